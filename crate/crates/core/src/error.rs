use thiserror::Error;

/// Errors produced by spdkit operations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not symmetric (max asymmetry {asymmetry:e}, allowed {allowed:e})")]
    NotSymmetric { asymmetry: f64, allowed: f64 },

    #[error("matrix is not positive definite (Cholesky pivot {pivot} failed)")]
    NotPositiveDefinite { pivot: usize },

    #[error("matrix contains a non-finite entry")]
    NonFinite,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("eigensolver did not converge within {max_iters} iterations")]
    ConvergenceFailure { max_iters: usize },

    #[error("Kronecker product dimension {dim} exceeds cap {cap}")]
    DimensionOverflow { dim: usize, cap: usize },

    #[error("input must be strictly positive: {0}")]
    NonPositiveInput(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    MaxItersExceeded { iterations: usize, residual: f64 },

    #[error("exponent overflow in Gram entry (log magnitude {log_magnitude:e})")]
    Overflow { log_magnitude: f64 },

    #[error("unknown law `{0}`")]
    UnknownLaw(String),

    #[error("parse error at {locus}: {message}")]
    Parse { locus: String, message: String },

    #[error("invalid matrix `{label}`: {reason}")]
    Validation { label: String, reason: Box<Error> },

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// True for failures of the numerical machinery itself, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::ConvergenceFailure { .. }
                | Error::Overflow { .. }
                | Error::MaxItersExceeded { .. }
                | Error::NotPositiveDefinite { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
