use thiserror::Error;

/// Errors raised by the numerical kernel.
///
/// Every variant that reports a violated invariant carries the measured
/// value so callers can print a useful diagnostic.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state is not normalized: measured norm {norm:.17e} (tolerance {tol:e})")]
    NotNormalized { norm: f64, tol: f64 },

    #[error("operator is not Hermitian: max |A - A^H| = {defect:.3e} (tolerance {tol:e})")]
    NotHermitian { defect: f64, tol: f64 },

    #[error("matrix is not unitary: max |U^H U - I| = {defect:.3e} (tolerance {tol:e})")]
    NotUnitary { defect: f64, tol: f64 },

    #[error("basis is not orthonormal: max |B^H B - I| = {defect:.3e} (tolerance {tol:e})")]
    NotOrthonormal { defect: f64, tol: f64 },

    #[error("invalid factor dimensions {dims:?}: {reason}")]
    InvalidDims { dims: Vec<usize>, reason: String },

    #[error("factor index {index} out of range for a state with {factors} factors")]
    InvalidFactor { index: usize, factors: usize },

    #[error("expected a state with {expected} factors, found {found}")]
    FactorCount { expected: usize, found: usize },

    #[error("{0}")]
    Domain(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
