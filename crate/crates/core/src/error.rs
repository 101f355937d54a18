use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("sublattices live in different ambient lattices")]
    AmbientMismatch,

    #[error("zero vector not allowed here")]
    ZeroVector,

    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),

    #[error("unsupported rank {got}: {context}")]
    UnsupportedRank { got: usize, context: String },

    #[error("chart data is corrupt: {0}")]
    ChartCorruption(String),

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("internal inconsistency: {0}")]
    Inconsistent(String),

    #[error("search overflow: {0}")]
    Overflow(String),

    #[error("data format error: {0}")]
    DataFormat(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
