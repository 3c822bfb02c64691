use thiserror::Error;

/// Errors shared across the engine.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("unsupported function `{0}`")]
    UnsupportedFunction(String),

    #[error("unbound variable `{0}`")]
    UnboundVariable(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("equivalence check inconclusive: {0}")]
    Inconclusive(String),

    #[error("insufficient jet order: needed {needed}, got {got}")]
    InsufficientOrder { needed: usize, got: usize },

    #[error("context mismatch: {0}")]
    ContextMismatch(String),

    #[error("rank mismatch: expected {expected}, got {got}")]
    RankMismatch { expected: usize, got: usize },

    #[error("not a linear bundle map: {0}")]
    NotLinear(String),

    #[error("numeric instability: {0}")]
    NumericInstability(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn parse(line: usize, col: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            col,
            msg: msg.into(),
        }
    }
}
