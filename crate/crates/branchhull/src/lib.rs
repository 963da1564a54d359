//! Solvers for the sparse bilinear inverse problem `y = (B h) .* (C m)` with
//! known signs.
//!
//! The feasible set intersects, per measurement, the convex hull of one
//! branch of the hyperbola `x w = y` (selected by the sign data) with a sign
//! half-space. Minimizing `||h||_1 + ||m||_1` over it recovers sparse factor
//! pairs; variants add a slack penalty for outliers and a pairwise-difference
//! objective for piecewise-constant fields. All three run on one scaled ADMM
//! engine whose projection step reduces to quartic root-finding per
//! measurement.
//!
//! Module map:
//! - [`model`]: problem data, configuration, objective/feasibility evaluation
//! - [`poly`]: quartic real-root extraction
//! - [`proj`]: exact projection onto the per-measurement feasible sets
//! - [`admm`]: the splitting engine and `solve`
//! - [`dict`]: Gaussian / partial-DCT / Bessel dictionaries, difference matrices
//! - [`lab`]: synthetic instances, success metrics, phase-transition grids
//! - [`imaging`]: image distortion removal
//! - [`special`]: gamma and Bessel-J evaluation
//! - [`linalg`]: operators, banded Cholesky, block solvers

pub mod admm;
pub mod dict;
pub mod error;
pub mod imaging;
pub mod lab;
pub mod linalg;
pub mod model;
pub mod poly;
pub mod proj;
pub mod special;

pub use admm::{admm_step, solve, SolverState, SplitOperators};
pub use error::{Error, Result};
pub use imaging::{flatten_image, FlattenOptions, FlattenResult, GrayImage};
pub use lab::{is_success, make_instance, run_phase_grid, theory_line, PhaseCell};
pub use linalg::Operator;
pub use model::{
    balanced_scaling, feasibility_violation, objective, BalancedPoint, Mode, PMatrixSpec,
    ProblemInstance, Solution, SolverConfig,
};
pub use proj::{project2, project3, project_set, HyperbolaBranch, KktCase};
