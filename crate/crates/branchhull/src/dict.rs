//! Construction of the dictionaries B, C and the pairwise-difference
//! structure matrices used by the solvers and experiments.

use nalgebra::DMatrix;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{BandMatrix, Operator};
use crate::special::bessel_j;

/// Greatest integer n with x - 1 < n <= x (plain floor, but with the
/// half-open contract the difference-matrix index formulas rely on).
pub fn half_open_floor(x: f64) -> i64 {
    x.floor() as i64
}

/// What kind of dictionary to build.
#[derive(Debug, Clone)]
pub enum DictKind {
    /// i.i.d. normal entries times `scale`.
    Gaussian { n_cols: usize, scale: f64 },
    /// The L x L identity.
    Identity,
    /// Ones column (optional) plus columns drawn without replacement from the
    /// orthonormal inverse-DCT basis.
    PartialDct { n_cols: usize, include_ones_column: bool },
    /// Ones column (optional) plus Bessel-J columns with random order/argument.
    Bessel { n_cols: usize, include_ones_column: bool },
    /// A caller-provided matrix (e.g. loaded from a file by the CLI).
    Explicit(DMatrix<f64>),
}

/// A dictionary recipe: the kind plus whether to rescale to `||.||_F = sqrt(L)`.
#[derive(Debug, Clone)]
pub struct DictionarySpec {
    pub kind: DictKind,
    pub frobenius_normalize: bool,
}

impl DictionarySpec {
    pub fn new(kind: DictKind) -> Self {
        DictionarySpec {
            kind,
            frobenius_normalize: false,
        }
    }

    pub fn normalized(kind: DictKind) -> Self {
        DictionarySpec {
            kind,
            frobenius_normalize: true,
        }
    }

    /// Builds the dictionary with `l` rows. Randomized kinds are
    /// deterministic in `seed`.
    pub fn build(&self, l: usize, seed: u64) -> Result<Operator> {
        let mut dense = match &self.kind {
            DictKind::Identity => return Ok(Operator::Identity(l)),
            DictKind::Gaussian { n_cols, scale } => make_gaussian(l, *n_cols, *scale, seed),
            DictKind::PartialDct {
                n_cols,
                include_ones_column,
            } => make_partial_dct_with(l, *n_cols, *include_ones_column, seed)?,
            DictKind::Bessel {
                n_cols,
                include_ones_column,
            } => make_bessel_with(l, *n_cols, *include_ones_column, seed)?,
            DictKind::Explicit(m) => {
                if m.nrows() != l {
                    return Err(Error::DimensionMismatch(format!(
                        "dictionary has {} rows, expected {}",
                        m.nrows(),
                        l
                    )));
                }
                m.clone()
            }
        };
        if self.frobenius_normalize {
            frobenius_normalize_to_sqrt_l(&mut dense)?;
        }
        Ok(Operator::Dense(dense))
    }
}

/// Rescales `m` in place so its Frobenius norm is sqrt(nrows).
pub fn frobenius_normalize_to_sqrt_l(m: &mut DMatrix<f64>) -> Result<()> {
    let norm = m.norm();
    if norm == 0.0 {
        return Err(Error::Degenerate("cannot normalize a zero matrix".into()));
    }
    let factor = (m.nrows() as f64).sqrt() / norm;
    *m *= factor;
    Ok(())
}

/// L x n matrix with i.i.d. N(0, 1) entries times `scale`.
pub fn make_gaussian(l: usize, n: usize, scale: f64, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = DMatrix::zeros(l, n);
    for c in 0..n {
        for r in 0..l {
            let g: f64 = rng.sample(StandardNormal);
            m[(r, c)] = scale * g;
        }
    }
    m
}

/// Orthonormal DCT-II analysis matrix T: row k is the k-th cosine basis
/// vector, T T^T = I. Its transpose is the inverse DCT.
pub fn dct_matrix(l: usize) -> DMatrix<f64> {
    let mut t = DMatrix::zeros(l, l);
    let lf = l as f64;
    for k in 0..l {
        let ck = if k == 0 {
            (1.0 / lf).sqrt()
        } else {
            (2.0 / lf).sqrt()
        };
        for n in 0..l {
            t[(k, n)] = ck * (std::f64::consts::PI * (2.0 * n as f64 + 1.0) * k as f64 / (2.0 * lf)).cos();
        }
    }
    t
}

/// Ones column plus `n_cols - 1` distinct columns of the inverse DCT.
pub fn make_partial_dct(l: usize, n_cols: usize, seed: u64) -> Result<DMatrix<f64>> {
    make_partial_dct_with(l, n_cols, true, seed)
}

fn make_partial_dct_with(l: usize, n_cols: usize, ones: bool, seed: u64) -> Result<DMatrix<f64>> {
    if n_cols == 0 || n_cols > l {
        return Err(Error::InvalidConfig(format!(
            "partial DCT needs 1..={l} columns, got {n_cols}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_random = if ones { n_cols - 1 } else { n_cols };
    let picks = rand::seq::index::sample(&mut rng, l, n_random);
    let mut m = DMatrix::zeros(l, n_cols);
    let mut col = 0;
    if ones {
        m.column_mut(0).fill(1.0);
        col = 1;
    }
    // Column j of the inverse DCT is the j-th cosine basis vector; filled
    // directly so large L never materializes the full basis.
    let lf = l as f64;
    for j in picks.iter() {
        let cj = if j == 0 { (1.0 / lf).sqrt() } else { (2.0 / lf).sqrt() };
        for i in 0..l {
            m[(i, col)] =
                cj * (std::f64::consts::PI * (2.0 * i as f64 + 1.0) * j as f64 / (2.0 * lf)).cos();
        }
        col += 1;
    }
    Ok(m)
}

/// Ones column plus Bessel-function columns: column entries are
/// `J_{g_i/(6+0.1|z1|) + 5|z2|}(0.1 + 10|z3|)` with `g_i` an equispaced ramp
/// from -9 to 5 and `z ~ N(0, I_3)` per column.
pub fn make_bessel(l: usize, n_cols: usize, seed: u64) -> Result<DMatrix<f64>> {
    make_bessel_with(l, n_cols, true, seed)
}

fn make_bessel_with(l: usize, n_cols: usize, ones: bool, seed: u64) -> Result<DMatrix<f64>> {
    if n_cols == 0 {
        return Err(Error::InvalidConfig("bessel dictionary needs n_cols >= 1".into()));
    }
    if l < 2 {
        return Err(Error::InvalidConfig("bessel dictionary needs L >= 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = DMatrix::zeros(l, n_cols);
    let mut col = 0;
    if ones {
        m.column_mut(0).fill(1.0);
        col = 1;
    }
    while col < n_cols {
        let z1: f64 = rng.sample::<f64, _>(StandardNormal).abs();
        let z2: f64 = rng.sample::<f64, _>(StandardNormal).abs();
        let z3: f64 = rng.sample::<f64, _>(StandardNormal).abs();
        let arg = 0.1 + 10.0 * z3;
        for i in 0..l {
            let g = -9.0 + 14.0 * i as f64 / (l as f64 - 1.0);
            let nu = g / (6.0 + 0.1 * z1) + 5.0 * z2;
            m[(i, col)] = bessel_j(nu, arg);
        }
        col += 1;
    }
    Ok(m)
}

/// Vertical and horizontal pairwise-difference matrices of a p x q image in
/// column-major vectorization, plus their stack.
#[derive(Debug, Clone)]
pub struct TvStructure {
    p: usize,
    q: usize,
    /// (negative index, positive index) per row; vertical rows first.
    rows: Vec<(usize, usize)>,
    n_vertical: usize,
}

/// Builds the difference structure for a p x q image (both at least 2).
pub fn make_tv_structure(p: usize, q: usize) -> Result<TvStructure> {
    if p < 2 || q < 2 {
        return Err(Error::InvalidConfig(format!(
            "difference structure needs p, q >= 2, got {p} x {q}"
        )));
    }
    let l = p * q;
    let mut rows = Vec::with_capacity(2 * l - p - q);
    // Vertical: row i (1-based) has -1 at i + ((i-1)/(p-1))_- and +1 just after.
    for i in 1..=(l - q) {
        let off = half_open_floor((i as f64 - 1.0) / (p as f64 - 1.0)) as usize;
        let neg = i + off - 1;
        rows.push((neg, neg + 1));
    }
    let n_vertical = rows.len();
    // Horizontal: row i has -1 at i and +1 at i + p.
    for i in 1..=(l - p) {
        rows.push((i - 1, i - 1 + p));
    }
    Ok(TvStructure {
        p,
        q,
        rows,
        n_vertical,
    })
}

impl TvStructure {
    pub fn image_rows(&self) -> usize {
        self.p
    }

    pub fn image_cols(&self) -> usize {
        self.q
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.p * self.q
    }

    pub fn n_vertical(&self) -> usize {
        self.n_vertical
    }

    pub fn row(&self, i: usize) -> (usize, usize) {
        self.rows[i]
    }

    pub fn apply(&self, v: &nalgebra::DVector<f64>) -> nalgebra::DVector<f64> {
        let mut out = nalgebra::DVector::zeros(self.rows.len());
        for (r, &(neg, pos)) in self.rows.iter().enumerate() {
            out[r] = v[pos] - v[neg];
        }
        out
    }

    pub fn apply_transpose(&self, g: &nalgebra::DVector<f64>) -> nalgebra::DVector<f64> {
        let mut out = nalgebra::DVector::zeros(self.ncols());
        for (r, &(neg, pos)) in self.rows.iter().enumerate() {
            out[pos] += g[r];
            out[neg] -= g[r];
        }
        out
    }

    /// D^T D as a band matrix (bandwidth p).
    pub fn gram_band(&self) -> BandMatrix {
        let mut band = BandMatrix::zeros(self.ncols(), self.p);
        for &(neg, pos) in &self.rows {
            band.add(neg, neg, 1.0);
            band.add(pos, pos, 1.0);
            band.add(pos, neg, -1.0);
        }
        band
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.nrows(), self.ncols());
        for (r, &(neg, pos)) in self.rows.iter().enumerate() {
            m[(r, neg)] = -1.0;
            m[(r, pos)] = 1.0;
        }
        m
    }

    pub fn vertical_dense(&self) -> DMatrix<f64> {
        self.to_dense().rows(0, self.n_vertical).into()
    }

    pub fn horizontal_dense(&self) -> DMatrix<f64> {
        self.to_dense()
            .rows(self.n_vertical, self.nrows() - self.n_vertical)
            .into()
    }
}
