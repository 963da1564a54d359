//! Real-root extraction for the quartic equations of the projection KKT
//! systems.
//!
//! Roots come from the eigenvalues of the companion matrix (QR iteration via
//! a Schur decomposition), then get polished by Newton steps. Near-multiple
//! roots surface as tight eigenvalue clusters; a cluster whose center passes
//! the residual test is reported once with its multiplicity.

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};

/// `a4 w^4 + a3 w^3 + a2 w^2 + a1 w + a0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quartic {
    pub a4: f64,
    pub a3: f64,
    pub a2: f64,
    pub a1: f64,
    pub a0: f64,
}

/// Imaginary parts below `REAL_IMAG_TOL * (1 + |re|)` classify an eigenvalue
/// as real. Kept tight so that projection stays continuous across the
/// feasible boundary.
const REAL_IMAG_TOL: f64 = 1e-9;

/// Eigenvalues closer than `CLUSTER_TOL * (1 + |center|)` are treated as one
/// root candidate of higher multiplicity (double roots split by about the
/// square root of machine epsilon under QR).
const CLUSTER_TOL: f64 = 5e-5;

impl Quartic {
    pub fn new(a4: f64, a3: f64, a2: f64, a1: f64, a0: f64) -> Self {
        Quartic { a4, a3, a2, a1, a0 }
    }

    pub fn eval(&self, w: f64) -> f64 {
        (((self.a4 * w + self.a3) * w + self.a2) * w + self.a1) * w + self.a0
    }

    pub fn eval_deriv(&self, w: f64) -> f64 {
        ((4.0 * self.a4 * w + 3.0 * self.a3) * w + 2.0 * self.a2) * w + self.a1
    }

    fn coeffs_desc(&self) -> [f64; 5] {
        [self.a4, self.a3, self.a2, self.a1, self.a0]
    }

    fn coeff_scale(&self) -> f64 {
        self.coeffs_desc()
            .iter()
            .fold(1.0_f64, |acc, c| acc.max(c.abs()))
    }
}

/// All real roots of `q`, ascending, with multiplicities.
///
/// Every returned root `w` satisfies `|q(w)| <= tol * max(1, max |coeff|)`.
/// Lower-degree polynomials (leading coefficients exactly zero) are handled;
/// the identically zero polynomial is an error.
pub fn real_roots(q: &Quartic, tol: f64) -> Result<Vec<(f64, usize)>> {
    let coeffs = q.coeffs_desc();
    if coeffs.iter().all(|c| *c == 0.0) {
        return Err(Error::Degenerate("all-zero polynomial".into()));
    }
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::Degenerate("non-finite polynomial coefficient".into()));
    }
    let lead = coeffs.iter().position(|c| *c != 0.0).unwrap();
    let degree = 4 - lead;
    if degree == 0 {
        // Nonzero constant: no roots.
        return Ok(Vec::new());
    }
    // Monic coefficients c[0..degree], descending powers below the leading 1.
    let monic: Vec<f64> = coeffs[lead + 1..].iter().map(|c| c / coeffs[lead]).collect();

    // Scale roots by a power of two so the companion matrix is balanced.
    let theta = root_scale(&monic);
    let scaled: Vec<f64> = monic
        .iter()
        .enumerate()
        .map(|(i, c)| c / theta.powi(i as i32 + 1))
        .collect();

    let mut eig = match degree {
        1 => vec![Complex::new(-scaled[0], 0.0)],
        2 => quadratic_roots(scaled[0], scaled[1]),
        _ => companion_eigenvalues(&scaled)?,
    };
    for e in eig.iter_mut() {
        *e = Complex::new(e.re * theta, e.im * theta);
        *e = polish_complex(&monic, *e);
    }

    let scale = q.coeff_scale();
    let resid_tol = tol * scale;
    let mut out: Vec<(f64, usize)> = Vec::new();
    for cluster in cluster(&eig) {
        let size = cluster.len();
        let center = cluster.iter().sum::<Complex<f64>>() / size as f64;
        let near_real = |z: Complex<f64>, slack: f64| z.im.abs() <= slack * (1.0 + z.re.abs());
        if size >= 2 && near_real(center, CLUSTER_TOL) {
            // Candidate multiple root: refine on the (size-1)-th derivative.
            let r = polish_on_derivative(&monic, center.re, size - 1);
            if q.eval(r).abs() <= resid_tol {
                out.push((r, size));
                continue;
            }
        }
        // Treat members individually; non-real ones are complex roots.
        for &z in &cluster {
            if near_real(z, REAL_IMAG_TOL) {
                let r = polish_real(&monic, z.re);
                out.push((r, 1));
            }
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(out)
}

/// Power-of-two scale factor that brings the monic coefficients near unit size.
fn root_scale(monic: &[f64]) -> f64 {
    let mut theta: f64 = 1.0;
    for (i, c) in monic.iter().enumerate() {
        if *c != 0.0 {
            theta = theta.max(c.abs().powf(1.0 / (i as f64 + 1.0)));
        }
    }
    let exp = theta.log2().round();
    2.0_f64.powi(exp as i32)
}

fn quadratic_roots(c1: f64, c0: f64) -> Vec<Complex<f64>> {
    let disc = c1 * c1 - 4.0 * c0;
    if disc >= 0.0 {
        let sq = disc.sqrt();
        let r1 = if c1 >= 0.0 { (-c1 - sq) / 2.0 } else { (-c1 + sq) / 2.0 };
        let r2 = if r1 != 0.0 { c0 / r1 } else { -c1 - r1 };
        vec![Complex::new(r1, 0.0), Complex::new(r2, 0.0)]
    } else {
        let im = (-disc).sqrt() / 2.0;
        vec![Complex::new(-c1 / 2.0, im), Complex::new(-c1 / 2.0, -im)]
    }
}

fn companion_eigenvalues(monic: &[f64]) -> Result<Vec<Complex<f64>>> {
    // monic[i] is the coefficient of w^(d-1-i); row k of the last column
    // holds minus the coefficient of w^k. Fixed-size matrices keep the
    // per-measurement projection quartics off the heap.
    let d = monic.len();
    let fail = || Error::RootFinding("companion QR iteration did not converge".into());
    match d {
        3 => {
            let mut comp = nalgebra::Matrix3::<f64>::zeros();
            comp[(1, 0)] = 1.0;
            comp[(2, 1)] = 1.0;
            for k in 0..3 {
                comp[(k, 2)] = -monic[2 - k];
            }
            let schur = nalgebra::linalg::Schur::try_new(comp, f64::EPSILON, 500).ok_or_else(fail)?;
            Ok(schur.complex_eigenvalues().iter().copied().collect())
        }
        4 => {
            let mut comp = nalgebra::Matrix4::<f64>::zeros();
            comp[(1, 0)] = 1.0;
            comp[(2, 1)] = 1.0;
            comp[(3, 2)] = 1.0;
            for k in 0..4 {
                comp[(k, 3)] = -monic[3 - k];
            }
            let schur = nalgebra::linalg::Schur::try_new(comp, f64::EPSILON, 500).ok_or_else(fail)?;
            Ok(schur.complex_eigenvalues().iter().copied().collect())
        }
        _ => {
            let mut comp = DMatrix::<f64>::zeros(d, d);
            for i in 1..d {
                comp[(i, i - 1)] = 1.0;
            }
            for k in 0..d {
                comp[(k, d - 1)] = -monic[d - 1 - k];
            }
            let schur = nalgebra::linalg::Schur::try_new(comp, f64::EPSILON, 500).ok_or_else(fail)?;
            Ok(schur.complex_eigenvalues().iter().copied().collect())
        }
    }
}

fn eval_monic_complex(monic: &[f64], z: Complex<f64>) -> (Complex<f64>, Complex<f64>) {
    let mut p = Complex::new(1.0, 0.0);
    let mut dp = Complex::new(0.0, 0.0);
    for &c in monic {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

fn polish_complex(monic: &[f64], mut z: Complex<f64>) -> Complex<f64> {
    // Newton steps accepted only when they shrink |p|; near a multiple root
    // both p and p' sit at rounding noise and an unguarded step would
    // scatter the eigenvalue cluster apart.
    let mut best = eval_monic_complex(monic, z).0.norm();
    for _ in 0..3 {
        let (p, dp) = eval_monic_complex(monic, z);
        if dp.norm() < 1e-300 {
            break;
        }
        let step = p / dp;
        if !step.re.is_finite() || !step.im.is_finite() {
            break;
        }
        let cand = z - step;
        let val = eval_monic_complex(monic, cand).0.norm();
        if val >= best {
            break;
        }
        best = val;
        z = cand;
    }
    z
}

fn polish_real(monic: &[f64], mut w: f64) -> f64 {
    let mut best = eval_monic_complex(monic, Complex::new(w, 0.0)).0.re.abs();
    for _ in 0..2 {
        let (p, dp) = eval_monic_complex(monic, Complex::new(w, 0.0));
        if dp.re.abs() < 1e-300 {
            break;
        }
        let step = p.re / dp.re;
        if !step.is_finite() {
            break;
        }
        let cand = w - step;
        let val = eval_monic_complex(monic, Complex::new(cand, 0.0)).0.re.abs();
        if val >= best {
            break;
        }
        best = val;
        w = cand;
    }
    w
}

/// Newton on the k-th derivative of the monic polynomial (a multiplicity
/// m root of p is a simple, well-conditioned root of p^(m-1)).
fn polish_on_derivative(monic: &[f64], mut w: f64, k: usize) -> f64 {
    // Descending coefficients including the leading 1.
    let mut c: Vec<f64> = std::iter::once(1.0).chain(monic.iter().copied()).collect();
    for _ in 0..k {
        let deg = c.len() - 1;
        c = c[..deg]
            .iter()
            .enumerate()
            .map(|(i, v)| v * (deg - i) as f64)
            .collect();
    }
    if c.len() <= 1 {
        return w;
    }
    let eval = |w: f64| -> (f64, f64) {
        let mut p = 0.0;
        let mut dp = 0.0;
        for &ci in &c {
            dp = dp * w + p;
            p = p * w + ci;
        }
        (p, dp)
    };
    let mut best = eval(w).0.abs();
    for _ in 0..3 {
        let (p, dp) = eval(w);
        if dp.abs() < 1e-300 || !(p / dp).is_finite() {
            break;
        }
        let cand = w - p / dp;
        let val = eval(cand).0.abs();
        if val >= best {
            break;
        }
        best = val;
        w = cand;
    }
    w
}

#[allow(clippy::needless_range_loop)] // union-find over index pairs
fn cluster(eig: &[Complex<f64>]) -> Vec<Vec<Complex<f64>>> {
    let n = eig.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let r = find(parent, parent[i]);
            parent[i] = r;
        }
        parent[i]
    }
    for i in 0..n {
        for j in i + 1..n {
            let d = (eig[i] - eig[j]).norm();
            let s = 1.0 + eig[i].norm().max(eig[j].norm());
            if d <= CLUSTER_TOL * s {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[ri] = rj;
            }
        }
    }
    let mut groups: Vec<Vec<Complex<f64>>> = vec![Vec::new(); n];
    for i in 0..n {
        let r = find(&mut parent, i);
        groups[r].push(eig[i]);
    }
    groups.retain(|g| !g.is_empty());
    groups
}
