use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("length {len} is not a power of two ({context})")]
    NotPowerOfTwo { len: usize, context: &'static str },

    #[error("dimension mismatch: expected {expected}, got {got} ({context})")]
    DimensionMismatch {
        expected: usize,
        got: usize,
        context: String,
    },

    #[error("cannot compose operator {left} ({left_dims:?}) with operator {right} ({right_dims:?}): inner dimensions differ")]
    ComposeMismatch {
        left: usize,
        right: usize,
        left_dims: (usize, usize),
        right_dims: (usize, usize),
    },

    #[error("invalid index set: {0}")]
    InvalidIndexSet(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("materialization of {rows}x{cols} exceeds the soft limit of {limit} entries; raise the limit (--max-entries) to proceed")]
    TooLarge {
        rows: usize,
        cols: usize,
        limit: usize,
    },

    #[error("exact enumeration needs {supports} supports (guard {guard}); use empirical_ric / --method sampled instead")]
    CombinatorialGuard { supports: u128, guard: u128 },

    #[error("rank-deficient least squares: {cols} columns, numerical rank {rank}")]
    RankDeficient { cols: usize, rank: usize },

    #[error("sequence is not unimodular: |entry {index}| = {modulus}")]
    NotUnimodular { index: usize, modulus: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True for user-facing configuration errors (as opposed to numerical ones).
    pub fn is_config_error(&self) -> bool {
        !matches!(
            self,
            Error::RankDeficient { .. } | Error::Numerical(_) | Error::Io(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
