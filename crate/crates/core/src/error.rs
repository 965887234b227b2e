use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid board: {0}")]
    InvalidBoard(String),
    #[error("element {0} is out of range for a board of size {1}")]
    OutOfRange(usize, usize),
    #[error("element {0} was already claimed")]
    DoubleClaim(usize),
    #[error("board mismatch: expected {expected} elements, got {actual}")]
    BoardMismatch { expected: usize, actual: usize },
    #[error("invalid bias: {0}")]
    InvalidBias(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("invalid tree: {0}")]
    InvalidTree(String),
    #[error("enumeration too large: {0}")]
    TooLarge(String),
    #[error("partition failed after {0} attempts")]
    PartitionFailed(usize),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
