use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid element index {0}, expected 0..=3")]
    InvalidElement(u8),

    #[error("{what} index {index} out of range 0..{len}")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        len: usize,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("size {0} exceeds the supported maximum of 64")]
    TooLarge(usize),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("no matrices in input")]
    EmptyInput,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unknown lemma identifier `{0}`")]
    UnknownLemma(String),
}

pub type Result<T> = std::result::Result<T, Error>;
