//! Exact spectral routines: symmetric eigenvalues, singular values, the nuclear norm,
//! numerical rank, and the normalized matrix entropy baseline.
//!
//! Singular values go through the smaller Gram matrix (`AᵀA` when `cols ≤ rows`, else
//! `AAᵀ`), so every exact path here costs `O(min(B²C, BC²))` plus an `O(k³)` eigensolve.

mod jacobi;
mod tridiagonal;

use crate::error::{Error, Result};
use crate::matrix::{center_and_row_normalize, Matrix};

/// Default off-diagonal tolerance for Jacobi, relative to `‖S‖_F`.
pub const JACOBI_TOL: f64 = 1e-10;
pub const JACOBI_MAX_SWEEPS: usize = 100;
/// Per-eigenvalue iteration cap for the tridiagonal QL solver.
pub const QL_MAX_ITER: usize = 60;
/// Gram eigenvalues at or below this fraction of the largest are treated as zero.
pub const PSD_CLAMP: f64 = 1e-12;
/// Default relative tolerance for [`numerical_rank`].
pub const RANK_TOL: f64 = 1e-8;
/// Matrices up to this order use Jacobi under [`EigenMethod::Auto`].
pub const AUTO_JACOBI_MAX_ORDER: usize = 128;

/// Eigenvalues sorted non-increasing, with the solver's convergence status.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub converged: bool,
    /// Jacobi sweeps, or QL iterations for the tridiagonal solver.
    pub sweeps_used: usize,
}

impl Spectrum {
    fn sorted(mut values: Vec<f64>, converged: bool, sweeps_used: usize) -> Spectrum {
        values.sort_by(|a, b| b.total_cmp(a));
        Spectrum {
            values,
            converged,
            sweeps_used,
        }
    }

    /// Fails with [`Error::NotConverged`] if the solver gave up.
    pub fn require_converged(self) -> Result<Spectrum> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NotConverged {
                iterations: self.sweeps_used,
            })
        }
    }

    pub fn max(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum EigenMethod {
    /// Jacobi for small matrices, tridiagonal QL above [`AUTO_JACOBI_MAX_ORDER`].
    #[default]
    Auto,
    Jacobi,
    Tridiagonal,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenConfig {
    pub method: EigenMethod,
    pub jacobi_tol: f64,
    pub max_sweeps: usize,
    pub ql_max_iter: usize,
}

impl Default for EigenConfig {
    fn default() -> Self {
        EigenConfig {
            method: EigenMethod::Auto,
            jacobi_tol: JACOBI_TOL,
            max_sweeps: JACOBI_MAX_SWEEPS,
            ql_max_iter: QL_MAX_ITER,
        }
    }
}

impl EigenConfig {
    pub fn with_method(method: EigenMethod) -> Self {
        EigenConfig {
            method,
            ..Default::default()
        }
    }
}

/// Eigenvalues of a square symmetric matrix.
///
/// Non-convergence is reported through [`Spectrum::converged`] with whatever partial
/// estimates the solver reached.
pub fn symmetric_eigenvalues(s: &Matrix, config: &EigenConfig) -> Result<Spectrum> {
    if !s.is_square() {
        return Err(Error::Shape(format!(
            "eigenvalues need a square matrix, got {}x{}",
            s.rows(),
            s.cols()
        )));
    }
    let n = s.rows();
    let limit = 1e-9 * s.max_abs();
    for i in 0..n {
        for j in i + 1..n {
            if (s.get(i, j) - s.get(j, i)).abs() > limit {
                return Err(Error::InvalidInput(format!(
                    "matrix is not symmetric at ({i}, {j})"
                )));
            }
        }
    }
    Ok(eigenvalues_unchecked(s.as_slice().to_vec(), n, config))
}

fn eigenvalues_unchecked(mut a: Vec<f64>, n: usize, config: &EigenConfig) -> Spectrum {
    let use_jacobi = match config.method {
        EigenMethod::Jacobi => true,
        EigenMethod::Tridiagonal => false,
        EigenMethod::Auto => n <= AUTO_JACOBI_MAX_ORDER,
    };
    if use_jacobi {
        let (converged, sweeps) =
            jacobi::diagonalize(&mut a, n, config.jacobi_tol, config.max_sweeps);
        let values = (0..n).map(|i| a[i * n + i]).collect();
        Spectrum::sorted(values, converged, sweeps)
    } else {
        let (mut diag, mut sub) = tridiagonal::reduce(&mut a, n);
        let (converged, iters) = tridiagonal::ql_implicit(&mut diag, &mut sub, config.ql_max_iter);
        Spectrum::sorted(diag, converged, iters)
    }
}

/// Eigenvalues of a Gram matrix, with everything below `PSD_CLAMP · λ_max` set to zero.
///
/// Gram matrices are only numerically PSD: a zero eigenvalue comes back as
/// `±ε·λ_max`, and its square root would otherwise surface as a phantom singular value
/// near `1e-8·σ_max`.
fn psd_eigenvalues(gram: &Matrix, config: &EigenConfig) -> Spectrum {
    let mut spectrum = eigenvalues_unchecked(gram.as_slice().to_vec(), gram.rows(), config);
    let floor = PSD_CLAMP * spectrum.max().max(0.0);
    for v in &mut spectrum.values {
        if *v <= floor {
            *v = 0.0;
        }
    }
    spectrum
}

/// Exact singular values, descending, of length `min(rows, cols)`.
pub fn singular_values(a: &Matrix, config: &EigenConfig) -> Spectrum {
    let mut spectrum = psd_eigenvalues(&a.smaller_gram(), config);
    for v in &mut spectrum.values {
        *v = v.sqrt();
    }
    spectrum
}

/// Sum of the exact singular values.
pub fn exact_nuclear_norm(a: &Matrix, config: &EigenConfig) -> Result<f64> {
    let spectrum = singular_values(a, config).require_converged()?;
    Ok(spectrum.values.iter().sum())
}

/// Number of singular values above `tol · σ_max`.
pub fn numerical_rank(a: &Matrix, tol: f64, config: &EigenConfig) -> Result<usize> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "rank tolerance must be positive, got {tol}"
        )));
    }
    let spectrum = singular_values(a, config).require_converged()?;
    let cutoff = tol * spectrum.max();
    Ok(spectrum.values.iter().filter(|&&s| s > cutoff).count())
}

/// `(1/m)·ZₙᵀZₙ` for the centered, row-normalized `Z`, scaled to unit trace (`d × d`).
///
/// This is the covariance whose spectrum defines the matrix entropy of one sample.
pub fn trace_normalized_covariance(z: &Matrix) -> Result<Matrix> {
    let normalized = center_and_row_normalize(z);
    let gram = normalized.gram_cols();
    unit_trace(gram)
}

fn unit_trace(gram: Matrix) -> Result<Matrix> {
    let trace = gram.trace();
    if trace <= 0.0 {
        return Err(Error::DegenerateSample);
    }
    gram.scaled(1.0 / trace)
}

/// `-Σ pᵢ ln pᵢ / ln(dim)` over the eigenvalues rescaled to a probability vector,
/// with `0·ln 0 = 0`.
pub fn normalized_spectral_entropy(eigenvalues: &[f64], dim: usize) -> Result<f64> {
    if dim < 2 {
        return Err(Error::InvalidInput(format!(
            "entropy normalizer needs dimension >= 2, got {dim}"
        )));
    }
    let total: f64 = eigenvalues.iter().map(|v| v.max(0.0)).sum();
    if total <= 0.0 {
        return Err(Error::DegenerateSample);
    }
    let h: f64 = eigenvalues
        .iter()
        .map(|v| v.max(0.0) / total)
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.ln())
        .sum();
    Ok((h.abs() / (dim as f64).ln()).clamp(0.0, 1.0))
}

/// Normalized matrix entropy of one hidden-state matrix, in `[0, 1]`.
///
/// Pipeline: center and row-normalize `Z`, form the unit-trace Gram matrix, take its
/// eigenvalues, and return their Shannon entropy over `ln d`. The smaller Gram side is
/// eigendecomposed; it has the same nonzero spectrum as the `d × d` covariance.
pub fn sample_matrix_entropy(z: &Matrix, config: &EigenConfig) -> Result<f64> {
    if z.rows() < 2 {
        return Err(Error::InvalidInput(format!(
            "matrix entropy needs at least 2 rows, got {}",
            z.rows()
        )));
    }
    let normalized = center_and_row_normalize(z);
    let gram = unit_trace(normalized.smaller_gram())?;
    let spectrum = psd_eigenvalues(&gram, config).require_converged()?;
    normalized_spectral_entropy(&spectrum.values, z.cols())
}

/// Mean of [`sample_matrix_entropy`] over samples sharing one feature dimension.
pub fn dataset_matrix_entropy(samples: &[Matrix], config: &EigenConfig) -> Result<f64> {
    let first = samples
        .first()
        .ok_or_else(|| Error::InvalidInput("dataset has no samples".into()))?;
    let d = first.cols();
    if let Some((i, s)) = samples.iter().enumerate().find(|(_, s)| s.cols() != d) {
        return Err(Error::Shape(format!(
            "sample {i} has {} columns, expected {d}",
            s.cols()
        )));
    }
    let mut total = 0.0;
    for s in samples {
        total += sample_matrix_entropy(s, config)?;
    }
    Ok(total / samples.len() as f64)
}
