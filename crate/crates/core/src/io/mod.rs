//! On-disk ingestion: NPY and CSV matrices, log-probability vectors, and sample manifests.

pub mod csv;
pub mod manifest;
pub mod npy;

use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub use manifest::{Sample, SampleManifest};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Npy,
    Csv,
}

impl Format {
    /// Guesses the format from the file extension.
    pub fn from_path(path: &Path) -> Option<Format> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "npy" => Some(Format::Npy),
            "csv" => Some(Format::Csv),
            _ => None,
        }
    }

    fn resolve(format: Option<Format>, path: &Path) -> Result<Format> {
        format.or_else(|| Format::from_path(path)).ok_or_else(|| {
            Error::InvalidInput(format!(
                "{}: cannot infer format from extension (expected .npy or .csv)",
                path.display()
            ))
        })
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "npy" => Ok(Format::Npy),
            "csv" => Ok(Format::Csv),
            other => Err(format!("unknown format '{other}' (expected npy or csv)")),
        }
    }
}

/// Loads a 2-D matrix, promoting every value to `f64`.
pub fn load_matrix(path: &Path, format: Format) -> Result<Matrix> {
    match format {
        Format::Npy => npy::read_matrix(path),
        Format::Csv => csv::read_matrix(path),
    }
}

/// Like [`load_matrix`], inferring the format from the extension when `format` is `None`.
pub fn load_matrix_auto(path: &Path, format: Option<Format>) -> Result<Matrix> {
    load_matrix(path, Format::resolve(format, path)?)
}

/// Loads a 1-D vector (NPY) or single-line vector (CSV).
pub fn load_vector(path: &Path, format: Option<Format>) -> Result<Vec<f64>> {
    match Format::resolve(format, path)? {
        Format::Npy => npy::read_vector(path),
        Format::Csv => csv::read_vector(path),
    }
}
