//! Normalized matrix entropy for single samples and for a dataset.

use mnn_core::gen;
use mnn_core::matrix::Matrix;
use mnn_core::spectral::{dataset_matrix_entropy, sample_matrix_entropy, EigenConfig, EigenMethod};

fn main() -> mnn_core::error::Result<()> {
    let cfg = EigenConfig::default();

    let isotropic = Matrix::from_rows(&[[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])?;
    let collapsed = Matrix::from_rows(&[[1.0, 0.0], [1.0, 0.0], [1.0, 0.0], [1.0, 0.001]])?;
    println!("isotropic  : {:.6}", sample_matrix_entropy(&isotropic, &cfg)?);
    println!("collapsed  : {:.6}", sample_matrix_entropy(&collapsed, &cfg)?);

    let samples: Vec<Matrix> = (0..10).map(|s| gen::standard_normal(32, 8, s)).collect();
    println!("dataset    : {:.6}", dataset_matrix_entropy(&samples, &cfg)?);

    // Both eigensolvers agree; Auto picks by matrix order.
    for method in [EigenMethod::Jacobi, EigenMethod::Tridiagonal] {
        let h = sample_matrix_entropy(&samples[0], &EigenConfig::with_method(method))?;
        println!("{method:?}: {h:.12}");
    }
    Ok(())
}
