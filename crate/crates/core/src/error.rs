use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("precision budget exceeded: {needed} bits needed, ceiling is {ceiling}")]
    PrecisionBudget { needed: u64, ceiling: u64 },

    #[error("sequence exhausted: {needed} terms requested, {available} available")]
    SequenceExhausted { needed: u64, available: u64 },

    #[error("matrix is not unipotent")]
    NotUnipotent,

    #[error("exact arithmetic requires rational parameters: {0}")]
    NotExact(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("resource limit: {0}")]
    Resource(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
