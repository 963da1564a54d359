//! Linear operators and the small direct solvers used by the ADMM engine.
//!
//! Dictionaries are dense in general, but the imaging pipeline sets `B = I`
//! and `P` to a pairwise-difference matrix; both get fast apply paths and a
//! banded Cholesky so that image-sized problems never materialize an L x L
//! dense matrix.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::dict::TvStructure;
use crate::error::{Error, Result};

/// A real linear map with a dense fallback and structured fast paths.
#[derive(Debug, Clone)]
pub enum Operator {
    /// The n x n identity.
    Identity(usize),
    /// An arbitrary dense matrix.
    Dense(DMatrix<f64>),
    /// A stacked pairwise-difference matrix (one -1 and one +1 per row).
    TvDiff(TvStructure),
}

impl Operator {
    pub fn nrows(&self) -> usize {
        match self {
            Operator::Identity(n) => *n,
            Operator::Dense(m) => m.nrows(),
            Operator::TvDiff(d) => d.nrows(),
        }
    }

    pub fn ncols(&self) -> usize {
        match self {
            Operator::Identity(n) => *n,
            Operator::Dense(m) => m.ncols(),
            Operator::TvDiff(d) => d.ncols(),
        }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, Operator::Identity(_))
    }

    /// `self * v`.
    pub fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        debug_assert_eq!(v.len(), self.ncols());
        match self {
            Operator::Identity(_) => v.clone(),
            Operator::Dense(m) => m * v,
            Operator::TvDiff(d) => d.apply(v),
        }
    }

    /// `self^T * v`.
    pub fn apply_transpose(&self, v: &DVector<f64>) -> DVector<f64> {
        debug_assert_eq!(v.len(), self.nrows());
        match self {
            Operator::Identity(_) => v.clone(),
            Operator::Dense(m) => m.transpose() * v,
            Operator::TvDiff(d) => d.apply_transpose(v),
        }
    }

    /// Row `i` dotted with `v`; used by per-measurement constraint checks.
    pub fn row_dot(&self, i: usize, v: &DVector<f64>) -> f64 {
        match self {
            Operator::Identity(_) => v[i],
            Operator::Dense(m) => m.row(i).transpose().dot(v),
            Operator::TvDiff(d) => {
                let (neg, pos) = d.row(i);
                v[pos] - v[neg]
            }
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        match self {
            Operator::Identity(n) => DMatrix::identity(*n, *n),
            Operator::Dense(m) => m.clone(),
            Operator::TvDiff(d) => d.to_dense(),
        }
    }
}

/// Cholesky factor of a symmetric positive definite band matrix.
///
/// The factor keeps the bandwidth of the input, so factorization is
/// O(n b^2) and each solve O(n b).
#[derive(Debug, Clone)]
pub struct BandedCholesky {
    n: usize,
    bw: usize,
    // Row-major lower band: entry (i, j) with i - bw <= j <= i lives at
    // i * (bw + 1) + (j + bw - i).
    low: Vec<f64>,
}

/// Symmetric band matrix in the same lower-band layout as [`BandedCholesky`].
#[derive(Debug, Clone)]
pub struct BandMatrix {
    pub n: usize,
    pub bw: usize,
    pub low: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, bw: usize) -> Self {
        BandMatrix {
            n,
            bw,
            low: vec![0.0; n * (bw + 1)],
        }
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j <= i && i - j <= self.bw);
        i * (self.bw + 1) + (j + self.bw - i)
    }

    /// Adds `v` to entry (i, j) of the symmetric matrix (lower triangle only).
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        let k = self.idx(r, c);
        self.low[k] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        if r - c > self.bw {
            return 0.0;
        }
        self.low[self.idx(r, c)]
    }
}

impl BandedCholesky {
    pub fn factor(a: &BandMatrix) -> Result<Self> {
        let (n, bw) = (a.n, a.bw);
        let mut low = vec![0.0; n * (bw + 1)];
        let at = |buf: &[f64], i: usize, j: usize| buf[i * (bw + 1) + (j + bw - i)];
        for i in 0..n {
            let jmin = i.saturating_sub(bw);
            for j in jmin..=i {
                let mut sum = a.get(i, j);
                for k in jmin.max(j.saturating_sub(bw))..j {
                    sum -= at(&low, i, k) * at(&low, j, k);
                }
                if j == i {
                    if sum <= 0.0 {
                        return Err(Error::Factorization(format!(
                            "band matrix not positive definite at pivot {i}"
                        )));
                    }
                    low[i * (bw + 1) + bw] = sum.sqrt();
                } else {
                    low[i * (bw + 1) + (j + bw - i)] = sum / at(&low, j, j);
                }
            }
        }
        Ok(BandedCholesky { n, bw, low })
    }

    pub fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        let (n, bw) = (self.n, self.bw);
        let at = |i: usize, j: usize| self.low[i * (bw + 1) + (j + bw - i)];
        let mut y = DVector::zeros(n);
        for i in 0..n {
            let mut s = b[i];
            for j in i.saturating_sub(bw)..i {
                s -= at(i, j) * y[j];
            }
            y[i] = s / at(i, i);
        }
        let mut x = DVector::zeros(n);
        for i in (0..n).rev() {
            let mut s = y[i];
            for j in (i + 1)..(i + bw + 1).min(n) {
                s -= at(j, i) * x[j];
            }
            x[i] = s / at(i, i);
        }
        x
    }
}

/// One factored diagonal block of the ADMM normal matrix.
#[derive(Debug)]
pub enum SpdSolver {
    /// `value * I_n`.
    Scalar { n: usize, value: f64 },
    Dense(Cholesky<f64, Dyn>),
    Banded(BandedCholesky),
}

impl SpdSolver {
    /// Factors `gram + extra`, where `gram = op^T op` for a structured or
    /// dense operator and `extra` is another Gram term (identity for most
    /// blocks). Chooses scalar, banded or dense form from the structure.
    pub fn for_sum(a: &Operator, b: &Operator) -> Result<Self> {
        if a.ncols() != b.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "gram blocks act on {} vs {} columns",
                a.ncols(),
                b.ncols()
            )));
        }
        let n = a.ncols();
        match (a, b) {
            (Operator::Identity(_), Operator::Identity(_)) => Ok(SpdSolver::Scalar { n, value: 2.0 }),
            (Operator::Identity(_), Operator::TvDiff(d)) | (Operator::TvDiff(d), Operator::Identity(_)) => {
                let mut band = d.gram_band();
                for i in 0..n {
                    band.add(i, i, 1.0);
                }
                Ok(SpdSolver::Banded(BandedCholesky::factor(&band)?))
            }
            _ => {
                let mut m = gram_dense(a);
                m += gram_dense(b);
                let chol = Cholesky::new(m).ok_or_else(|| {
                    Error::Factorization("normal-equation block not positive definite".into())
                })?;
                Ok(SpdSolver::Dense(chol))
            }
        }
    }

    pub fn n(&self) -> usize {
        match self {
            SpdSolver::Scalar { n, .. } => *n,
            SpdSolver::Dense(c) => c.l_dirty().nrows(),
            SpdSolver::Banded(b) => b.n,
        }
    }

    pub fn solve(&self, rhs: &DVector<f64>) -> DVector<f64> {
        match self {
            SpdSolver::Scalar { value, .. } => rhs / *value,
            SpdSolver::Dense(c) => c.solve(rhs),
            SpdSolver::Banded(b) => b.solve(rhs),
        }
    }
}

fn gram_dense(op: &Operator) -> DMatrix<f64> {
    match op {
        Operator::Identity(n) => DMatrix::identity(*n, *n),
        Operator::Dense(m) => m.transpose() * m,
        Operator::TvDiff(d) => {
            let m = d.to_dense();
            m.transpose() * &m
        }
    }
}
