//! Scaled ADMM engine for the generalized sign-constrained program.
//!
//! Splitting: with z stacking (m, h, g) where g carries lambda * xi,
//!
//! ```text
//!   E = blockdiag(C, B, I_L / lambda)   u = (x, w, xi)   in C
//!   Q = blockdiag(I_N, P, I_L)          v = (m, P h, g)  carries the l1 terms
//! ```
//!
//! Each sweep projects u onto the feasible set, soft-thresholds v, solves the
//! normal system (E^T E + Q^T Q) z = E^T(alpha + u) + Q^T(beta + v) through
//! its cached block factorization, then updates the scaled duals. Noiseless
//! mode drops the slack block entirely and projects in two variables.

use nalgebra::{DMatrix, DVector};

use crate::error::Result;
use crate::linalg::{Operator, SpdSolver};
use crate::model::{objective, Mode, ProblemInstance, Solution, SolverConfig};
use crate::proj::{project_set, HyperbolaBranch};

/// Cached split operators and the block factorization of E^T E + Q^T Q.
#[derive(Debug)]
pub struct SplitOperators {
    mode: Mode,
    lambda: f64,
    b: Operator,
    c: Operator,
    p: Operator,
    m_solver: SpdSolver,
    h_solver: SpdSolver,
    /// Diagonal of the slack block: lambda^-2 + 1.
    xi_scale: f64,
    l: usize,
    k: usize,
    n: usize,
}

impl SplitOperators {
    pub fn new(instance: &ProblemInstance, config: &SolverConfig) -> Result<Self> {
        config.validate()?;
        let p = config.resolve_p(instance.b())?;
        let m_solver = SpdSolver::for_sum(instance.c(), &Operator::Identity(instance.n()))?;
        let h_solver = SpdSolver::for_sum(instance.b(), &p)?;
        Ok(SplitOperators {
            mode: config.mode,
            lambda: config.lambda,
            b: instance.b().clone(),
            c: instance.c().clone(),
            p,
            m_solver,
            h_solver,
            xi_scale: config.lambda.powi(-2) + 1.0,
            l: instance.l(),
            k: instance.k(),
            n: instance.n(),
        })
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn p(&self) -> &Operator {
        &self.p
    }

    fn has_slack(&self) -> bool {
        self.mode != Mode::Noiseless
    }

    pub fn z_len(&self) -> usize {
        self.n + self.k + if self.has_slack() { self.l } else { 0 }
    }

    pub fn u_len(&self) -> usize {
        if self.has_slack() {
            3 * self.l
        } else {
            2 * self.l
        }
    }

    pub fn v_len(&self) -> usize {
        self.n + self.p.nrows() + if self.has_slack() { self.l } else { 0 }
    }

    /// `E z = (C m, B h, g / lambda)`.
    pub fn apply_e(&self, z: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.u_len());
        let x = self.c.apply(&z.rows(0, self.n).into_owned());
        let w = self.b.apply(&z.rows(self.n, self.k).into_owned());
        out.rows_mut(0, self.l).copy_from(&x);
        out.rows_mut(self.l, self.l).copy_from(&w);
        if self.has_slack() {
            let g = z.rows(self.n + self.k, self.l);
            out.rows_mut(2 * self.l, self.l).copy_from(&(g / self.lambda));
        }
        out
    }

    /// `E^T u = (C^T x, B^T w, xi / lambda)`.
    pub fn apply_e_t(&self, u: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.z_len());
        let cm = self.c.apply_transpose(&u.rows(0, self.l).into_owned());
        let bh = self.b.apply_transpose(&u.rows(self.l, self.l).into_owned());
        out.rows_mut(0, self.n).copy_from(&cm);
        out.rows_mut(self.n, self.k).copy_from(&bh);
        if self.has_slack() {
            let xi = u.rows(2 * self.l, self.l);
            out.rows_mut(self.n + self.k, self.l)
                .copy_from(&(xi / self.lambda));
        }
        out
    }

    /// `Q z = (m, P h, g)`.
    pub fn apply_q(&self, z: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.v_len());
        out.rows_mut(0, self.n).copy_from(&z.rows(0, self.n));
        let ph = self.p.apply(&z.rows(self.n, self.k).into_owned());
        out.rows_mut(self.n, self.p.nrows()).copy_from(&ph);
        if self.has_slack() {
            out.rows_mut(self.n + self.p.nrows(), self.l)
                .copy_from(&z.rows(self.n + self.k, self.l));
        }
        out
    }

    /// `Q^T v = (v_m, P^T v_p, v_g)`.
    pub fn apply_q_t(&self, v: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.z_len());
        out.rows_mut(0, self.n).copy_from(&v.rows(0, self.n));
        let pth = self
            .p
            .apply_transpose(&v.rows(self.n, self.p.nrows()).into_owned());
        out.rows_mut(self.n, self.k).copy_from(&pth);
        if self.has_slack() {
            out.rows_mut(self.n + self.k, self.l)
                .copy_from(&v.rows(self.n + self.p.nrows(), self.l));
        }
        out
    }

    /// Solves `(E^T E + Q^T Q) z = rhs` through the cached block factors.
    pub fn solve_normal(&self, rhs: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.z_len());
        let zm = self.m_solver.solve(&rhs.rows(0, self.n).into_owned());
        let zh = self.h_solver.solve(&rhs.rows(self.n, self.k).into_owned());
        out.rows_mut(0, self.n).copy_from(&zm);
        out.rows_mut(self.n, self.k).copy_from(&zh);
        if self.has_slack() {
            let zg = rhs.rows(self.n + self.k, self.l) / self.xi_scale;
            out.rows_mut(self.n + self.k, self.l).copy_from(&zg);
        }
        out
    }

    /// Dense E, for structural tests on small instances.
    pub fn e_dense(&self) -> DMatrix<f64> {
        let mut e = DMatrix::zeros(self.u_len(), self.z_len());
        e.view_mut((0, 0), (self.l, self.n)).copy_from(&self.c.to_dense());
        e.view_mut((self.l, self.n), (self.l, self.k))
            .copy_from(&self.b.to_dense());
        if self.has_slack() {
            for i in 0..self.l {
                e[(2 * self.l + i, self.n + self.k + i)] = 1.0 / self.lambda;
            }
        }
        e
    }

    /// Dense Q, for structural tests on small instances.
    pub fn q_dense(&self) -> DMatrix<f64> {
        let mut q = DMatrix::zeros(self.v_len(), self.z_len());
        for i in 0..self.n {
            q[(i, i)] = 1.0;
        }
        q.view_mut((self.n, self.n), (self.p.nrows(), self.k))
            .copy_from(&self.p.to_dense());
        if self.has_slack() {
            for i in 0..self.l {
                q[(self.n + self.p.nrows() + i, self.n + self.k + i)] = 1.0;
            }
        }
        q
    }
}

/// ADMM iterates and scaled duals.
#[derive(Debug, Clone)]
pub struct SolverState {
    pub u: DVector<f64>,
    pub v: DVector<f64>,
    pub z: DVector<f64>,
    pub alpha: DVector<f64>,
    pub beta: DVector<f64>,
    pub iteration: usize,
    /// Right-hand side of the previous normal solve (equals M z), kept for
    /// the dual residual.
    prev_rhs: DVector<f64>,
}

impl SolverState {
    /// Zero-initialized state (z0 = 0, alpha0 = 0, beta0 = 0).
    pub fn new(ops: &SplitOperators) -> Self {
        SolverState {
            u: DVector::zeros(ops.u_len()),
            v: DVector::zeros(ops.v_len()),
            z: DVector::zeros(ops.z_len()),
            alpha: DVector::zeros(ops.u_len()),
            beta: DVector::zeros(ops.v_len()),
            iteration: 0,
            prev_rhs: DVector::zeros(ops.z_len()),
        }
    }
}

/// Residuals of one sweep.
#[derive(Debug, Clone, Copy)]
pub struct StepInfo {
    /// `||u - E z||_2 + ||v - Q z||_2` after the sweep.
    pub primal_residual: f64,
    /// `rho * ||M (z_k - z_{k-1})||_2`.
    pub dual_residual: f64,
}

/// Entrywise shrinkage toward zero by `c` (the l1 proximal map).
pub fn soft_threshold(v: &DVector<f64>, c: f64) -> DVector<f64> {
    assert!(c > 0.0, "soft threshold needs a positive parameter");
    v.map(|x| {
        if x > c {
            x - c
        } else if x < -c {
            x + c
        } else {
            0.0
        }
    })
}

/// One sweep of the five updates (projection, shrinkage, normal solve, two
/// dual steps) in place.
pub fn admm_step(
    state: &mut SolverState,
    instance: &ProblemInstance,
    config: &SolverConfig,
    ops: &SplitOperators,
) -> Result<StepInfo> {
    let ez = ops.apply_e(&state.z);
    state.u = project_set(&(&ez - &state.alpha), instance)?;
    debug_assert!(
        u_violation(&state.u, instance) <= 1e-9,
        "projected iterate left the feasible set"
    );

    let qz = ops.apply_q(&state.z);
    state.v = soft_threshold(&(&qz - &state.beta), 1.0 / config.rho);

    let rhs = ops.apply_e_t(&(&state.alpha + &state.u)) + ops.apply_q_t(&(&state.beta + &state.v));
    state.z = ops.solve_normal(&rhs);

    let r_u = &state.u - &ops.apply_e(&state.z);
    let r_v = &state.v - &ops.apply_q(&state.z);
    state.alpha += &r_u;
    state.beta += &r_v;

    let dual = config.rho * (&rhs - &state.prev_rhs).norm();
    state.prev_rhs = rhs;
    state.iteration += 1;
    Ok(StepInfo {
        primal_residual: r_u.norm() + r_v.norm(),
        dual_residual: dual,
    })
}

/// Worst constraint violation of the u iterate across coordinates.
pub fn u_violation(u: &DVector<f64>, instance: &ProblemInstance) -> f64 {
    let l = instance.l();
    let mut worst = 0.0_f64;
    for i in 0..l {
        let branch = match HyperbolaBranch::new(instance.y()[i], instance.t()[i]) {
            Ok(b) => b,
            Err(_) => return f64::INFINITY,
        };
        let v = if u.len() == 3 * l {
            branch.violation3(u[i], u[l + i], u[2 * l + i])
        } else {
            branch.violation2(u[i], u[l + i])
        };
        worst = worst.max(v);
    }
    worst
}

/// Runs ADMM from the zero state until both residual tests pass or the
/// iteration budget is spent. Non-convergence is reported, not an error.
pub fn solve(instance: &ProblemInstance, config: &SolverConfig) -> Result<Solution> {
    let ops = SplitOperators::new(instance, config)?;
    let mut state = SolverState::new(&ops);
    let mut last = StepInfo {
        primal_residual: f64::INFINITY,
        dual_residual: f64::INFINITY,
    };
    let mut converged = false;
    while state.iteration < config.max_iters {
        last = admm_step(&mut state, instance, config, &ops)?;
        if last.primal_residual <= config.tol_primal && last.dual_residual <= config.tol_dual {
            converged = true;
            break;
        }
    }
    let (n, k, l) = (instance.n(), instance.k(), instance.l());
    let m_hat: DVector<f64> = state.z.rows(0, n).into_owned();
    let h_hat: DVector<f64> = state.z.rows(n, k).into_owned();
    let xi_hat: DVector<f64> = if ops.has_slack() {
        state.z.rows(n + k, l) / config.lambda
    } else {
        DVector::zeros(l)
    };
    let objective = objective(&h_hat, &m_hat, &xi_hat, ops.p(), config.lambda, config.mode)?;
    Ok(Solution {
        h_hat,
        m_hat,
        xi_hat,
        objective,
        iters_used: state.iteration,
        primal_residual: last.primal_residual,
        dual_residual: last.dual_residual,
        converged,
    })
}
