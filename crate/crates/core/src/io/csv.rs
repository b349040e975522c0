//! Headerless comma-separated matrices: one row per line, `.` as the decimal separator.

use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

fn csv_err(path: &Path, row: usize, message: impl Into<String>) -> Error {
    Error::Csv {
        path: path.to_path_buf(),
        row,
        message: message.into(),
    }
}

fn parse_field(path: &Path, row: usize, col: usize, field: &str) -> Result<f64> {
    let v: f64 = field
        .parse()
        .map_err(|_| csv_err(path, row, format!("column {}: cannot parse '{field}'", col + 1)))?;
    if !v.is_finite() {
        return Err(csv_err(path, row, format!("column {}: non-finite value", col + 1)));
    }
    Ok(v)
}

fn records(path: &Path, bytes: &[u8]) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 1;
        let record = record.map_err(|e| csv_err(path, line, e.to_string()))?;
        let values = record
            .iter()
            .enumerate()
            .map(|(col, f)| parse_field(path, line, col, f))
            .collect::<Result<Vec<_>>>()?;
        rows.push(values);
    }
    Ok(rows)
}

pub fn parse_matrix(path: &Path, bytes: &[u8]) -> Result<Matrix> {
    let rows = records(path, bytes)?;
    let cols = match rows.first() {
        Some(r) => r.len(),
        None => return Err(csv_err(path, 1, "no rows")),
    };
    if let Some(bad) = rows.iter().position(|r| r.len() != cols) {
        return Err(csv_err(
            path,
            bad + 1,
            format!("expected {cols} columns, found {}", rows[bad].len()),
        ));
    }
    let n = rows.len();
    Matrix::new(n, cols, rows.into_iter().flatten().collect())
}

/// Parses a single-line vector.
pub fn parse_vector(path: &Path, bytes: &[u8]) -> Result<Vec<f64>> {
    let mut rows = records(path, bytes)?;
    match rows.len() {
        1 => Ok(rows.pop().unwrap()),
        0 => Err(csv_err(path, 1, "no values")),
        n => Err(csv_err(path, 2, format!("expected one line, found {n}"))),
    }
}

pub fn read_matrix(path: &Path) -> Result<Matrix> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_matrix(path, &bytes)
}

pub fn read_vector(path: &Path) -> Result<Vec<f64>> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_vector(path, &bytes)
}
