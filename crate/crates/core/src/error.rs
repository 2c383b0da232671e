use thiserror::Error;

pub type Result<T> = std::result::Result<T, QresError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QresError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("dimension {dim} exceeds the supported maximum {max} (override with QRES_MAX_DIM)")]
    DimensionTooLarge { dim: usize, max: usize },

    #[error("matrix has {got} entries, expected {expected}")]
    EntryCount { expected: usize, got: usize },

    #[error("matrix entries must be finite (entry ({row}, {col}) is not)")]
    NonFinite { row: usize, col: usize },

    #[error("not Hermitian: max |m - m^dagger| = {deviation:e} exceeds {tolerance:e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error(
        "not positive semidefinite: smallest eigenvalue {min_eigenvalue:e} below -{tolerance:e}"
    )]
    NotPositive { min_eigenvalue: f64, tolerance: f64 },

    #[error("trace is {trace}, expected 1 within {tolerance:e}")]
    TraceNotOne { trace: f64, tolerance: f64 },

    #[error("not unitary: max |U^dagger U - I| = {deviation:e}")]
    NotUnitary { deviation: f64 },

    #[error("Kraus operators incomplete: max |sum A^dagger A - I| = {deviation:e}")]
    IncompleteKraus { deviation: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),
}
