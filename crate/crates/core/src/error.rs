use std::path::PathBuf;

/// Errors produced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("empty dataset")]
    EmptyDataset,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported exponent: {0}")]
    UnsupportedExponent(String),

    #[error("series too long for brute-force enumeration: {n} > {max}")]
    BruteForceTooLong { n: usize, max: usize },

    #[error("non-finite sample at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("parse error at row {row}: {message}")]
    Parse { row: usize, message: String },

    #[error("bad dataset file {path}: {message}")]
    BadFile { path: PathBuf, message: String },

    #[error("search strategies disagreed on the nearest neighbor: {details}")]
    StrategyMismatch { details: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
