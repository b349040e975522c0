//! Discriminability and diversity measures on prediction matrices, plus the token-level
//! cross-entropy and perplexity baselines.
//!
//! Natural logarithms throughout, and `0·ln 0 = 0`.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::spectral::{exact_nuclear_norm, EigenConfig};

/// Allowed drift of a row sum away from 1.
pub const ROW_SUM_TOL: f64 = 1e-6;
/// Slack applied to every norm inequality in [`nuclear_bounds_check`].
pub const BOUND_SLACK: f64 = 1e-9;

/// Per-token natural-log probabilities of one sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct LogProbSequence(Vec<f64>);

impl LogProbSequence {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInput("log-prob sequence is empty".into()));
        }
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v > 0.0)
        {
            return Err(Error::InvalidInput(format!(
                "log-prob at position {i} is {v}; values must be finite and <= 0"
            )));
        }
        Ok(LogProbSequence(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Checks that entries lie in `[0, 1]` and each row sums to 1 within [`ROW_SUM_TOL`].
pub fn check_row_stochastic(a: &Matrix) -> Result<()> {
    for (i, row) in a.row_iter().enumerate() {
        if let Some(j) = row.iter().position(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::InvalidInput(format!(
                "row {i}: entry {j} is {} (must be in [0, 1])",
                row[j]
            )));
        }
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() > ROW_SUM_TOL {
            return Err(Error::InvalidInput(format!("row {i} sums to {sum}, not 1")));
        }
    }
    Ok(())
}

pub fn is_row_stochastic(a: &Matrix) -> bool {
    check_row_stochastic(a).is_ok()
}

/// Mean Shannon entropy of the rows of a row-stochastic matrix.
pub fn shannon_entropy(a: &Matrix) -> Result<f64> {
    check_row_stochastic(a)?;
    let total: f64 = a
        .as_slice()
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.ln())
        .sum();
    // Terms are non-negative; abs() only clears the sign of -0.0 from p = 1.
    Ok(total.abs() / a.rows() as f64)
}

pub fn frobenius_norm(a: &Matrix) -> f64 {
    a.frobenius_norm()
}

/// Frobenius norm range `(√(B/C), √B)` of a `B × C` row-stochastic matrix.
pub fn frobenius_bounds(rows: usize, cols: usize) -> (f64, f64) {
    let b = rows as f64;
    ((b / cols as f64).sqrt(), b.sqrt())
}

/// Norm sandwich of a matrix, evaluated with the exact nuclear norm.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundsCheck {
    pub frobenius: f64,
    pub nuclear: f64,
    /// `nuclear/√D ≤ frobenius ≤ nuclear`
    pub lower_ok: bool,
    /// `nuclear ≤ √D·frobenius`, and `nuclear ≤ √(D·B)` when the matrix is row-stochastic
    pub upper_ok: bool,
    pub d_min: usize,
    pub row_stochastic: bool,
}

pub fn nuclear_bounds_check(a: &Matrix, config: &EigenConfig) -> Result<BoundsCheck> {
    let frobenius = a.frobenius_norm();
    let nuclear = exact_nuclear_norm(a, config)?;
    let d_min = a.rows().min(a.cols());
    let sqrt_d = (d_min as f64).sqrt();
    let row_stochastic = is_row_stochastic(a);

    let lower_ok = nuclear / sqrt_d <= frobenius + BOUND_SLACK && frobenius <= nuclear + BOUND_SLACK;
    let mut upper_ok = nuclear <= sqrt_d * frobenius + BOUND_SLACK;
    if row_stochastic {
        upper_ok &= nuclear <= (d_min as f64 * a.rows() as f64).sqrt() + BOUND_SLACK;
    }
    Ok(BoundsCheck {
        frobenius,
        nuclear,
        lower_ok,
        upper_ok,
        d_min,
        row_stochastic,
    })
}

/// Mean negative log-likelihood per token.
pub fn cross_entropy(lp: &LogProbSequence) -> f64 {
    -lp.values().iter().sum::<f64>() / lp.len() as f64
}

/// `exp` of the cross-entropy.
pub fn perplexity(lp: &LogProbSequence) -> f64 {
    cross_entropy(lp).exp()
}
