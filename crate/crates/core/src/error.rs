use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Malformed NPY container; `offset` is the byte position of the problem.
    #[error("{path}: byte {offset}: {message}")]
    Npy {
        path: PathBuf,
        offset: usize,
        message: String,
    },

    /// Malformed CSV content; `row` is 1-based.
    #[error("{path}: row {row}: {message}")]
    Csv {
        path: PathBuf,
        row: usize,
        message: String,
    },

    #[error("{path}: invalid manifest: {message}")]
    Manifest { path: PathBuf, message: String },

    #[error("{path}: invalid report: {message}")]
    Report { path: PathBuf, message: String },

    #[error("invalid shape: {0}")]
    Shape(String),

    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Every centered row vanished, so there is nothing to measure.
    #[error("degenerate sample")]
    DegenerateSample,

    #[error("eigensolver did not converge after {iterations} iterations")]
    NotConverged { iterations: usize },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
