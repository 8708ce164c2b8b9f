use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(
        "invalid split: threshold {threshold} not inside ({lower}, {upper}) along variable {dim}"
    )]
    InvalidSplit {
        dim: usize,
        threshold: f64,
        lower: f64,
        upper: f64,
    },
    #[error("invalid cell: {0}")]
    InvalidCell(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("empty cell: no samples to evaluate")]
    EmptyCell,
    #[error("unsupported model: {0}")]
    UnsupportedModel(String),
    #[error("unsupported cell for closed-form criterion: {0}")]
    UnsupportedCell(String),
    #[error("infeasible cell: acceptance rate {rate:e} below 1e-4")]
    InfeasibleCell { rate: f64 },
    #[error("tree/dataset mismatch: {0}")]
    Mismatch(String),
    #[error("internal consistency error: {0}")]
    Internal(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("csv error: {0}")]
    Csv(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}
