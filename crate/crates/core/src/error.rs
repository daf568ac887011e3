use thiserror::Error;

/// Errors surfaced by the solver library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: entry ({row},{col}) deviates from conj(({col},{row})) by {deviation:.3e}")]
    NonHermitianInput {
        row: usize,
        col: usize,
        deviation: f64,
    },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("dimension {0} exceeds the dense-matrix limit of 16")]
    DimensionTooLarge(usize),
    #[error("basis index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("two-level rotation indices must differ (both are {0})")]
    EqualIndices(usize),
    #[error("flip-noise epsilon {0} outside [0, 0.5]")]
    InvalidEpsilon(f64),
    #[error("eigenvalue gap is degenerate (cos Δ = 1); fidelity inversion undefined")]
    GapDegenerate,
    #[error("radicand {0:.3e} below tolerance floor in fidelity inversion")]
    RadicandNegative(f64),
    #[error("batch statistics require at least one record")]
    EmptyBatch,
    #[error("{shots} shots cannot cover {terms} measured Pauli terms")]
    InsufficientShots { shots: usize, terms: usize },
    #[error("ansatz parameter length mismatch: expected {expected}, got {actual}")]
    ParamLengthMismatch { expected: usize, actual: usize },
    #[error("unknown preset '{0}'")]
    UnknownPreset(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
