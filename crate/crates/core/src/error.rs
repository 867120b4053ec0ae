use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("row {row}: not a permutation of 1..{m}")]
    NotPermutation { row: usize, m: usize },

    #[error("row {row}: alternative {alt} out of range 1..{m}")]
    AlternativeOutOfRange { row: usize, alt: i64, m: usize },

    #[error("{what} index {index} out of range 1..{max}")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        max: usize,
    },

    #[error("empty {0} selection")]
    EmptySelection(&'static str),

    #[error("voter indices must be distinct, got {0:?}")]
    NotDistinct(Vec<usize>),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("operation requires dimension {expected}, got {got}")]
    WrongDimension { expected: usize, got: usize },

    #[error("embedding shape {got:?} does not match profile shape (n={n}, m={m})")]
    ShapeMismatch {
        n: usize,
        m: usize,
        got: (usize, usize),
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("sign for voter {voter}, alternative {alt}, axis {axis} is undecided")]
    UndecidedSign { voter: usize, alt: usize, axis: usize },

    #[error("internal verification failure: {0}")]
    Verification(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
