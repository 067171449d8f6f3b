use thiserror::Error;

/// Errors raised by the spectral pipelines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid operator spec: {0}")]
    InvalidSpec(String),

    #[error("matrix is not Hermitian (relative asymmetry {0:e})")]
    NotHermitian(f64),

    #[error("Hermitian eigensolver did not converge")]
    NoConvergence,

    #[error("invalid grid size {0}, need at least 2 points")]
    InvalidGrid(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("period 1 has no interlacing submatrix")]
    DegeneratePeriod,

    #[error("shift {shift} out of range for period {period}")]
    InvalidShift { shift: usize, period: usize },

    #[error("Hausdorff distance is undefined for an empty set")]
    EmptySet,

    #[error("theorem hypothesis violated: {0}")]
    HypothesisViolation(String),

    #[error("{0} is not a period of the sequence")]
    InvalidCandidate(usize),

    #[error("pick {index} ({value}) does not lie in its spectrum")]
    InvalidPick { index: usize, value: f64 },

    #[error("truncation of size {size} exceeds the limit of {limit}")]
    SizeLimit { size: usize, limit: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
