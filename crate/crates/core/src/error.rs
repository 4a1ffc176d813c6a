use thiserror::Error;

/// Errors raised by the Toeplitz, circulant, solver and spectral routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension {requested} exceeds the dense limit of {cap}")]
    ResourceLimit { requested: usize, cap: usize },

    #[error("operator is not positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("operator is singular: smallest |eigenvalue| {min_abs:e} vs largest {max_abs:e}")]
    Singular { min_abs: f64, max_abs: f64 },

    #[error("iteration broke down: {0}")]
    Breakdown(String),

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("domain error: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
