use thiserror::Error;

/// Errors raised by the library. Every fallible operation returns this type.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("invalid group data: {0}")]
    Group(String),

    #[error("non-integral genus: {0}")]
    NonIntegralGenus(String),

    #[error("polynomial division is not exact: {0}")]
    InexactDivision(String),

    #[error("invalid generating vector: {0}")]
    InvalidGeneratingVector(String),

    #[error("kernel abelianization has torsion {0:?}")]
    KernelTorsion(Vec<String>),

    #[error("invalid fibration data: {0}")]
    InvalidFibration(String),

    #[error("relative class does not match the problem: {0}")]
    MismatchedWeights(String),

    #[error("parameter out of supported range: {0}")]
    OutOfRange(String),

    #[error("schema error: {0}")]
    Schema(String),
}

pub type Result<T> = std::result::Result<T, Error>;
