use thiserror::Error;

/// Errors produced by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter {name} = {value} is out of range ({expected})")]
    OutOfRange {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("point {re}{im:+}i lies on the branch cut [1, inf)")]
    BranchCut { re: f64, im: f64 },
    #[error("pole at z = 0")]
    PoleAtZero,
    #[error("root bracketing failed after {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("index {index} outside valid range {lo}..={hi}")]
    Index { index: usize, lo: usize, hi: usize },
    #[error("quadrature failed: estimated error {abs_err:e} exceeds tolerance {tolerance:e}")]
    QuadratureFailure { abs_err: f64, tolerance: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
