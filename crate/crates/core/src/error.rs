use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("vector is not unit-norm (norm = {norm})")]
    NotUnit { norm: f64 },

    #[error("dimension {0} is not prime")]
    NotPrime(usize),

    #[error("{what} = {value} is out of range ({allowed})")]
    OutOfRange {
        what: &'static str,
        value: String,
        allowed: &'static str,
    },

    #[error("tensor space too large: {dim}^{order} exceeds the 4096 guard")]
    ResourceGuard { dim: usize, order: usize },

    #[error("ensemble '{label}' failed the {order}-design check (deviation {deviation:e})")]
    NotADesign {
        label: String,
        order: usize,
        deviation: f64,
    },

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn out_of_range(what: &'static str, value: impl ToString, allowed: &'static str) -> Self {
        Error::OutOfRange {
            what,
            value: value.to_string(),
            allowed,
        }
    }
}
