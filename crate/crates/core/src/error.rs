use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A target coupling on a pair the hardware cannot couple.
    #[error("coupling J[{i}][{j}] is zero but the target entry is {value}")]
    VanishingCoupling { i: usize, j: usize, value: f64 },

    #[error("size cap exceeded: n = {n}, cap = {cap}")]
    CapExceeded { n: usize, cap: usize },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("iteration limit reached after {0} iterations")]
    IterationLimit(usize),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("gate `{0}` is not diagonal")]
    NonDiagonal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
