//! Problem data, solver configuration and the objective/feasibility
//! evaluations shared by every other module.

use nalgebra::{DMatrix, DVector};

use crate::dict::make_tv_structure;
use crate::error::{Error, Result};
use crate::linalg::Operator;

/// Entrywise-product measurement data: `y = (B h) .* (C m)` with known signs
/// `s = sign(y)` and `t = sign(B h)`.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    b: Operator,
    c: Operator,
    y: DVector<f64>,
    s: DVector<f64>,
    t: DVector<f64>,
    truth: Option<(DVector<f64>, DVector<f64>)>,
}

fn sign0(v: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else if v > 0.0 {
        1.0
    } else {
        -1.0
    }
}

impl ProblemInstance {
    /// Validates dimensions and sign conventions; `s` is derived from `y`.
    ///
    /// When ground truth is supplied, `y` must reproduce `(B h) .* (C m)` to
    /// a 1e-12 relative tolerance and `t` must match `sign(B h)` wherever
    /// `B h` is nonzero.
    pub fn new(
        b: Operator,
        c: Operator,
        y: DVector<f64>,
        t: DVector<f64>,
        truth: Option<(DVector<f64>, DVector<f64>)>,
    ) -> Result<Self> {
        let l = y.len();
        if l == 0 {
            return Err(Error::DimensionMismatch("empty measurement vector".into()));
        }
        if b.nrows() != l || c.nrows() != l || t.len() != l {
            return Err(Error::DimensionMismatch(format!(
                "B has {} rows, C has {}, y has {}, t has {}",
                b.nrows(),
                c.nrows(),
                l,
                t.len()
            )));
        }
        if !y.iter().all(|v| v.is_finite()) {
            return Err(Error::Degenerate("non-finite measurement".into()));
        }
        if t.iter().any(|v| *v != 1.0 && *v != -1.0) {
            return Err(Error::InvalidConfig("t entries must be -1 or +1".into()));
        }
        let s = y.map(sign0);
        if let Some((h, m)) = &truth {
            if h.len() != b.ncols() || m.len() != c.ncols() {
                return Err(Error::DimensionMismatch(format!(
                    "truth sizes {}/{} vs dictionary columns {}/{}",
                    h.len(),
                    m.len(),
                    b.ncols(),
                    c.ncols()
                )));
            }
            let w = b.apply(h);
            let x = c.apply(m);
            let scale = y.amax().max(1e-300);
            for i in 0..l {
                if (w[i] * x[i] - y[i]).abs() > 1e-12 * scale {
                    return Err(Error::InvalidConfig(format!(
                        "y[{i}] does not match the truth product"
                    )));
                }
                if w[i] != 0.0 && t[i] != sign0(w[i]) {
                    return Err(Error::InvalidConfig(format!(
                        "t[{i}] disagrees with sign(B h)[{i}]"
                    )));
                }
            }
        }
        Ok(ProblemInstance { b, c, y, s, t, truth })
    }

    pub fn b(&self) -> &Operator {
        &self.b
    }

    pub fn c(&self) -> &Operator {
        &self.c
    }

    pub fn y(&self) -> &DVector<f64> {
        &self.y
    }

    pub fn s(&self) -> &DVector<f64> {
        &self.s
    }

    pub fn t(&self) -> &DVector<f64> {
        &self.t
    }

    pub fn truth(&self) -> Option<(&DVector<f64>, &DVector<f64>)> {
        self.truth.as_ref().map(|(h, m)| (h, m))
    }

    /// Number of measurements.
    pub fn l(&self) -> usize {
        self.y.len()
    }

    /// Columns of B.
    pub fn k(&self) -> usize {
        self.b.ncols()
    }

    /// Columns of C.
    pub fn n(&self) -> usize {
        self.c.ncols()
    }
}

/// Which variant of the feasibility program to solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// No slack variable; objective `||h||_1 + ||m||_1`.
    Noiseless,
    /// Slack per measurement; objective `||h||_1 + ||m||_1 + lambda ||xi||_1`.
    Robust,
    /// Slack plus a structure matrix; objective `||P h||_1 + ||m||_1 + lambda ||xi||_1`.
    Tv,
}

/// How to obtain the structure matrix P.
#[derive(Debug, Clone)]
pub enum PMatrixSpec {
    Identity,
    /// Pairwise differences of the p x q image formed by `B h`.
    TvOfB { rows: usize, cols: usize },
    Explicit(DMatrix<f64>),
}

/// Solver knobs. `rho` is the ADMM step size; `lambda` weighs the slack
/// penalty in the robust and structured modes.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub mode: Mode,
    pub lambda: f64,
    pub rho: f64,
    pub max_iters: usize,
    pub tol_primal: f64,
    pub tol_dual: f64,
    pub p_matrix: PMatrixSpec,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            mode: Mode::Noiseless,
            lambda: 1e3,
            rho: 1.0,
            max_iters: 10_000,
            tol_primal: 1e-10,
            tol_dual: 1e-10,
            p_matrix: PMatrixSpec::Identity,
        }
    }
}

impl SolverConfig {
    pub fn noiseless(rho: f64) -> Self {
        SolverConfig {
            rho,
            ..SolverConfig::default()
        }
    }

    pub fn robust(lambda: f64, rho: f64) -> Self {
        SolverConfig {
            mode: Mode::Robust,
            lambda,
            rho,
            ..SolverConfig::default()
        }
    }

    pub fn tv(lambda: f64, rho: f64, rows: usize, cols: usize) -> Self {
        SolverConfig {
            mode: Mode::Tv,
            lambda,
            rho,
            p_matrix: PMatrixSpec::TvOfB { rows, cols },
            ..SolverConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.lambda.is_nan() || self.lambda <= 0.0 {
            return Err(Error::InvalidConfig("lambda must be positive".into()));
        }
        if self.rho.is_nan() || self.rho <= 0.0 {
            return Err(Error::InvalidConfig("rho must be positive".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be at least 1".into()));
        }
        if self.tol_primal.is_nan()
            || self.tol_primal <= 0.0
            || self.tol_dual.is_nan()
            || self.tol_dual <= 0.0
        {
            return Err(Error::InvalidConfig("tolerances must be positive".into()));
        }
        if self.mode == Mode::Noiseless && !matches!(self.p_matrix, PMatrixSpec::Identity) {
            return Err(Error::InvalidConfig(
                "noiseless mode requires the identity structure matrix".into(),
            ));
        }
        Ok(())
    }

    /// Materializes P against the given B (P = D B for the difference spec).
    pub fn resolve_p(&self, b: &Operator) -> Result<Operator> {
        match &self.p_matrix {
            PMatrixSpec::Identity => Ok(Operator::Identity(b.ncols())),
            PMatrixSpec::TvOfB { rows, cols } => {
                if rows * cols != b.nrows() {
                    return Err(Error::DimensionMismatch(format!(
                        "image {rows} x {cols} does not match {} measurements",
                        b.nrows()
                    )));
                }
                let d = make_tv_structure(*rows, *cols)?;
                if b.is_identity() {
                    Ok(Operator::TvDiff(d))
                } else {
                    Ok(Operator::Dense(d.to_dense() * b.to_dense()))
                }
            }
            PMatrixSpec::Explicit(m) => {
                if m.ncols() != b.ncols() {
                    return Err(Error::DimensionMismatch(format!(
                        "P has {} columns, B has {}",
                        m.ncols(),
                        b.ncols()
                    )));
                }
                Ok(Operator::Dense(m.clone()))
            }
        }
    }
}

/// Solver output: recovered coefficients, slack and diagnostics.
#[derive(Debug, Clone)]
pub struct Solution {
    pub h_hat: DVector<f64>,
    pub m_hat: DVector<f64>,
    pub xi_hat: DVector<f64>,
    pub objective: f64,
    pub iters_used: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub converged: bool,
}

/// A pair rescaled so both factors carry equal l1 mass.
#[derive(Debug, Clone)]
pub struct BalancedPoint {
    pub h_tilde: DVector<f64>,
    pub m_tilde: DVector<f64>,
}

fn l1(v: &DVector<f64>) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

/// Rescales `(h, m)` along the scaling ambiguity to the representative with
/// `||h||_1 = ||m||_1`; the entrywise product `(B h) .* (C m)` is unchanged.
pub fn balanced_scaling(h: &DVector<f64>, m: &DVector<f64>) -> Result<BalancedPoint> {
    let (nh, nm) = (l1(h), l1(m));
    if nh == 0.0 || nm == 0.0 {
        return Err(Error::Degenerate(
            "balanced scaling needs both l1 norms positive".into(),
        ));
    }
    let factor = (nm / nh).sqrt();
    Ok(BalancedPoint {
        h_tilde: h * factor,
        m_tilde: m / factor,
    })
}

/// `||P h||_1 + ||m||_1 + lambda ||xi||_1`; the slack and structure terms are
/// dropped in noiseless mode.
pub fn objective(
    h: &DVector<f64>,
    m: &DVector<f64>,
    xi: &DVector<f64>,
    p: &Operator,
    lambda: f64,
    mode: Mode,
) -> Result<f64> {
    if p.ncols() != h.len() {
        return Err(Error::DimensionMismatch(format!(
            "P has {} columns, h has {} entries",
            p.ncols(),
            h.len()
        )));
    }
    match mode {
        Mode::Noiseless => Ok(l1(h) + l1(m)),
        Mode::Robust | Mode::Tv => Ok(l1(&p.apply(h)) + l1(m) + lambda * l1(xi)),
    }
}

/// Largest constraint violation of `(h, m, xi)` on the instance: the maximum
/// over measurements of `max(0, |y| - s (xi + c^T m) b^T h)` and
/// `max(0, -t b^T h)`. Zero exactly when feasible.
pub fn feasibility_violation(
    h: &DVector<f64>,
    m: &DVector<f64>,
    xi: &DVector<f64>,
    instance: &ProblemInstance,
) -> Result<f64> {
    if h.len() != instance.k() || m.len() != instance.n() || xi.len() != instance.l() {
        return Err(Error::DimensionMismatch(format!(
            "point sizes {}/{}/{} vs instance {}/{}/{}",
            h.len(),
            m.len(),
            xi.len(),
            instance.k(),
            instance.n(),
            instance.l()
        )));
    }
    let w = instance.b.apply(h);
    let x = instance.c.apply(m);
    let mut worst = 0.0_f64;
    for i in 0..instance.l() {
        let hyper = instance.y[i].abs() - instance.s[i] * (xi[i] + x[i]) * w[i];
        let sign = -instance.t[i] * w[i];
        worst = worst.max(hyper.max(0.0)).max(sign.max(0.0));
    }
    Ok(worst)
}
