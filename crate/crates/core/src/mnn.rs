//! Matrix Nuclear-Norm: the nuclear norm approximated by the largest column L2 norms.
//!
//! When a matrix is close to having one dominant entry per row, its columns are nearly
//! orthogonal and the column norms approach the singular values. Summing the top `D`
//! of them gives an `O(B·C)` stand-in for the nuclear norm with no eigensolve and
//! nothing that can fail to converge.

use crate::error::{Error, Result};
use crate::matrix::{column_l2_norms, mean_embedding, Matrix, ROW_NORM_EPS};

/// Knobs for [`approx_nuclear_norm`] and [`matrix_nuclear_norm`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MnnConfig {
    /// Number of leading column norms to keep; `min(rows, cols)` when unset.
    pub top_d: Option<usize>,
    /// Sequence length to divide by; the row count when unset.
    pub length_override: Option<usize>,
}

impl MnnConfig {
    pub fn with_top_d(mut self, top_d: usize) -> Self {
        self.top_d = Some(top_d);
        self
    }

    pub fn with_length(mut self, length: usize) -> Self {
        self.length_override = Some(length);
        self
    }

    fn resolve_top_d(&self, a: &Matrix) -> Result<usize> {
        match self.top_d {
            None => Ok(a.rows().min(a.cols())),
            Some(0) => Err(Error::InvalidInput("top_d must be at least 1".into())),
            Some(d) if d > a.cols() => Err(Error::InvalidInput(format!(
                "top_d {d} exceeds the {} columns available",
                a.cols()
            ))),
            Some(d) => Ok(d),
        }
    }
}

/// Column L2 norms sorted descending; ties keep the lower column index first.
pub fn approx_singular_values(a: &Matrix) -> Vec<f64> {
    let mut norms = column_l2_norms(a);
    // sort_by is stable, so equal norms stay in column order.
    norms.sort_by(|x, y| y.total_cmp(x));
    norms
}

/// Sum of the `top_d` largest column norms (the batch nuclear norm).
pub fn approx_nuclear_norm(a: &Matrix, config: &MnnConfig) -> Result<f64> {
    let top_d = config.resolve_top_d(a)?;
    Ok(approx_singular_values(a).iter().take(top_d).sum())
}

/// Column L2 norms of the centered, row-normalized matrix, and the number of rows that
/// survived normalization.
///
/// Same arithmetic as `column_l2_norms(&center_and_row_normalize(x))`, but streams rows
/// through one scratch buffer instead of materializing the normalized copy.
pub fn normalized_column_norms(x: &Matrix) -> (Vec<f64>, usize) {
    let mean = mean_embedding(x);
    let mut sums = vec![0.0; x.cols()];
    let mut scratch = vec![0.0; x.cols()];
    let mut kept = 0;
    for row in x.row_iter() {
        for ((c, v), m) in scratch.iter_mut().zip(row).zip(&mean) {
            *c = v - m;
        }
        let norm = scratch.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < ROW_NORM_EPS {
            continue;
        }
        kept += 1;
        let inv = 1.0 / norm;
        for (s, c) in sums.iter_mut().zip(&scratch) {
            let u = c * inv;
            *s += u * u;
        }
    }
    (sums.into_iter().map(f64::sqrt).collect(), kept)
}

/// Length-normalized Matrix Nuclear-Norm of a raw hidden-state matrix.
///
/// The rows are centered on the mean embedding and scaled to unit length, then the
/// top-`D` column norms are summed and divided by the input length.
pub fn matrix_nuclear_norm(x: &Matrix, config: &MnnConfig) -> Result<f64> {
    let length = match config.length_override {
        Some(0) => return Err(Error::InvalidInput("length must be at least 1".into())),
        Some(l) => l,
        None => x.rows(),
    };
    let top_d = config.resolve_top_d(x)?;
    let (mut norms, kept) = normalized_column_norms(x);
    if kept == 0 {
        return Err(Error::DegenerateSample);
    }
    norms.sort_by(|a, b| b.total_cmp(a));
    Ok(norms.iter().take(top_d).sum::<f64>() / length as f64)
}
