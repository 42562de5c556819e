use thiserror::Error;

/// Errors produced by the toolkit.
///
/// Solver outcomes that are legitimate answers (range violations, a
/// non-cancellable connection) are reported through
/// [`SolveStatus`](crate::solver::SolveStatus) rather than through this type.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix contains a non-finite entry")]
    NonFinite,

    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },

    #[error("matrix is not square or rows are ragged: {0}")]
    Shape(String),

    #[error("function undefined at {x}: {reason}")]
    Domain { x: f64, reason: String },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("matrix is not positive definite (min eigenvalue {min_eigenvalue:e})")]
    NotPd { min_eigenvalue: f64 },

    #[error("value {value} lies outside the range of the function (gap {gap:e})")]
    Range { value: f64, gap: f64 },

    #[error("function is constant and has no inverse")]
    NotInjective,

    #[error("regularization schedule exhausted without convergence (last gap {gap:e})")]
    NoConvergence { gap: f64 },

    #[error("solution residual {residual:e} exceeds {bound:e}")]
    Residual { residual: f64, bound: f64 },

    #[error("connection is not a mean: f(1) = {f1}")]
    NotAMean { f1: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
