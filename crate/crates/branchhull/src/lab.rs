//! Synthetic instances, success metrics and the empirical phase-transition
//! grid.

use nalgebra::DVector;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::admm::solve;
use crate::dict::make_gaussian;
use crate::error::{Error, Result};
use crate::linalg::Operator;
use crate::model::{balanced_scaling, BalancedPoint, ProblemInstance, Solution, SolverConfig};

/// One grid cell of the phase portrait.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseCell {
    pub n: usize,
    pub k: usize,
    pub l: usize,
    pub s1: usize,
    pub s2: usize,
    pub trials: usize,
    pub successes: usize,
    pub seed_base: u64,
}

impl PhaseCell {
    pub fn success_rate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.successes as f64 / self.trials as f64
        }
    }
}

/// Order-independent, platform-stable seed mixer (splitmix64 chain).
pub fn stable_seed(parts: &[u64]) -> u64 {
    let mut acc: u64 = 0x243F_6A88_85A3_08D3;
    for &p in parts {
        let mut z = acc ^ p.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        acc = z ^ (z >> 31);
    }
    acc
}

/// Nonzero count used by the phase grid: 0.05 N rounded half away from zero,
/// floored at one.
pub fn sparsity_for(n: usize) -> usize {
    ((0.05 * n as f64).round() as usize).max(1)
}

/// Gaussian dictionaries at scale 1/sqrt(L) with sparse +-1 ground truth.
pub fn make_instance(
    n: usize,
    k: usize,
    l: usize,
    sparsity_count: usize,
    seed: u64,
) -> Result<ProblemInstance> {
    if n == 0 || k == 0 || l == 0 {
        return Err(Error::InvalidConfig("dimensions must be positive".into()));
    }
    if sparsity_count == 0 || sparsity_count > k.min(n) {
        return Err(Error::InvalidConfig(format!(
            "sparsity {sparsity_count} out of range for K={k}, N={n}"
        )));
    }
    let scale = 1.0 / (l as f64).sqrt();
    let b = make_gaussian(l, k, scale, stable_seed(&[seed, 1]));
    let c = make_gaussian(l, n, scale, stable_seed(&[seed, 2]));
    let mut rng = ChaCha8Rng::seed_from_u64(stable_seed(&[seed, 3]));
    let mut h = DVector::zeros(k);
    for idx in rand::seq::index::sample(&mut rng, k, sparsity_count).iter() {
        h[idx] = if rng.random::<bool>() { 1.0 } else { -1.0 };
    }
    let mut m = DVector::zeros(n);
    for idx in rand::seq::index::sample(&mut rng, n, sparsity_count).iter() {
        m[idx] = if rng.random::<bool>() { 1.0 } else { -1.0 };
    }
    let w = &b * &h;
    let x = &c * &m;
    let y = w.component_mul(&x);
    // Rows where B h vanishes exactly leave t unconstrained; +1 by convention.
    let t = w.map(|v| if v >= 0.0 { 1.0 } else { -1.0 });
    ProblemInstance::new(
        Operator::Dense(b),
        Operator::Dense(c),
        y,
        t,
        Some((h, m)),
    )
}

/// Whether the solution lands within `threshold` (l2, joint in (h, m)) of the
/// balanced ground truth.
pub fn is_success(solution: &Solution, instance: &ProblemInstance, threshold: f64) -> Result<bool> {
    let (h, m) = instance
        .truth()
        .ok_or_else(|| Error::MissingTruth("success metric needs ground truth".into()))?;
    let balanced = balanced_scaling(h, m)?;
    let dh = (&solution.h_hat - &balanced.h_tilde).norm_squared();
    let dm = (&solution.m_hat - &balanced.m_tilde).norm_squared();
    Ok((dh + dm).sqrt() < threshold)
}

/// `C (S1 + S2) ln^2(K + N)`.
pub fn theory_line(s1: usize, s2: usize, k: usize, n: usize, c: f64) -> f64 {
    let log = ((k + n) as f64).ln();
    c * (s1 + s2) as f64 * log * log
}

/// Runs the noiseless solver over the (N, L) grid with K = N and
/// sparsity 0.05 N; cells and trials are independent and reproducible from
/// the per-trial seed mix.
pub fn run_phase_grid(
    n_list: &[usize],
    l_list: &[usize],
    trials: usize,
    rho: f64,
    threshold: f64,
    seed: u64,
) -> Result<Vec<PhaseCell>> {
    if n_list.is_empty() || l_list.is_empty() {
        return Err(Error::InvalidConfig("empty grid axis".into()));
    }
    if n_list.iter().chain(l_list.iter()).any(|v| *v == 0) {
        return Err(Error::InvalidConfig("grid values must be positive".into()));
    }
    if rho.is_nan() || rho <= 0.0 || threshold.is_nan() || threshold <= 0.0 {
        return Err(Error::InvalidConfig("rho and threshold must be positive".into()));
    }
    let mut cells = Vec::with_capacity(n_list.len() * l_list.len());
    for &n in n_list {
        for &l in l_list {
            let s = sparsity_for(n);
            let successes = (0..trials)
                .into_par_iter()
                .filter(|&trial| {
                    run_phase_trial(n, l, s, rho, threshold, seed, trial as u64)
                })
                .count();
            cells.push(PhaseCell {
                n,
                k: n,
                l,
                s1: s,
                s2: s,
                trials,
                successes,
                seed_base: seed,
            });
        }
    }
    Ok(cells)
}

fn run_phase_trial(
    n: usize,
    l: usize,
    sparsity: usize,
    rho: f64,
    threshold: f64,
    seed: u64,
    trial: u64,
) -> bool {
    let trial_seed = stable_seed(&[seed, n as u64, l as u64, trial]);
    let instance = match make_instance(n, n, l, sparsity, trial_seed) {
        Ok(i) => i,
        Err(_) => return false,
    };
    let config = SolverConfig::noiseless(rho);
    match solve(&instance, &config) {
        Ok(sol) => is_success(&sol, &instance, threshold).unwrap_or(false),
        Err(_) => false,
    }
}

/// Linearized (tangent half-space) constraints at the balanced truth:
/// `s (b^T h * c^T m~ + b^T h~ * c^T m) >= 2 |y|` for every measurement.
/// These contain the feasible set; any feasible pair must satisfy them.
pub fn lp_constraints_hold(
    h: &DVector<f64>,
    m: &DVector<f64>,
    instance: &ProblemInstance,
    truth_balanced: &BalancedPoint,
) -> Result<bool> {
    if h.len() != instance.k() || m.len() != instance.n() {
        return Err(Error::DimensionMismatch(format!(
            "point sizes {}/{} vs instance {}/{}",
            h.len(),
            m.len(),
            instance.k(),
            instance.n()
        )));
    }
    let w = instance.b().apply(h);
    let x = instance.c().apply(m);
    let wt = instance.b().apply(&truth_balanced.h_tilde);
    let xt = instance.c().apply(&truth_balanced.m_tilde);
    Ok((0..instance.l()).all(|i| {
        let lhs = instance.s()[i] * (w[i] * xt[i] + wt[i] * x[i]);
        let rhs = 2.0 * instance.y()[i].abs();
        // Small slack absorbs the floating-point feasibility of sampled points.
        lhs >= rhs - 1e-7 * (1.0 + rhs)
    }))
}
