//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors produced by instance construction, solvers and builders.
#[derive(Debug, Error)]
pub enum Error {
    /// Vector or matrix dimensions are inconsistent.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// An input is degenerate for the requested operation (e.g. a zero norm).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// A configuration value violates its documented range.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Polynomial root extraction failed.
    #[error("root finding failed: {0}")]
    RootFinding(String),

    /// The per-coordinate projection found no admissible root. This indicates
    /// a numerical failure and must not occur for finite inputs.
    #[error("projection failed: {0}")]
    Projection(String),

    /// A normal-equation block was not positive definite.
    #[error("factorization failed: {0}")]
    Factorization(String),

    /// An operation that needs ground truth was called on an instance without it.
    #[error("missing ground truth: {0}")]
    MissingTruth(String),
}

pub type Result<T> = std::result::Result<T, Error>;
