use thiserror::Error;

use crate::povm::ValidationReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix with {len} entries is not square for dim {dim}")]
    NonSquare { dim: usize, len: usize },

    #[error("matrix dimension must be at least 1")]
    EmptyMatrix,

    #[error("matrix contains a non-finite entry")]
    NonFinite,

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("observable has a degenerate spectrum (eigenvalue gap {gap:e})")]
    DegenerateSpectrum { gap: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("invalid POVM: {0}")]
    InvalidPovm(ValidationReport),

    #[error("{name} = {value} is out of range")]
    OutOfRange { name: &'static str, value: f64 },

    #[error("probabilities sum to {sum}, expected 1")]
    Unnormalized { sum: f64 },

    #[error("response functions: {0}")]
    MissingResponse(String),

    #[error("grand POVM labels do not encode the product outcome space: {0}")]
    MalformedLabels(String),

    #[error("product outcome space has {size} outcomes, cap is {cap}")]
    OutcomeCap { size: usize, cap: usize },

    #[error("{0}")]
    Invalid(String),
}
