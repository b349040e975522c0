//! Shannon entropy, Frobenius norm and the nuclear-norm sandwich on prediction matrices.

use mnn_core::gen;
use mnn_core::matrix::Matrix;
use mnn_core::prob::{frobenius_bounds, frobenius_norm, nuclear_bounds_check, shannon_entropy};
use mnn_core::spectral::EigenConfig;

fn main() -> mnn_core::error::Result<()> {
    println!("uniform -> one-hot over 8 classes:");
    for k in 0..=10 {
        let t = k as f64 / 10.0;
        let row: Vec<f64> = (0..8).map(|j| (1.0 - t) / 8.0 + if j == 0 { t } else { 0.0 }).collect();
        let a = Matrix::from_rows(&[row])?;
        println!("  t={t:.1} H={:.4} F={:.4}", shannon_entropy(&a)?, frobenius_norm(&a));
    }

    let a = gen::row_stochastic(32, 8, 11);
    let (lo, hi) = frobenius_bounds(32, 8);
    let check = nuclear_bounds_check(&a, &EigenConfig::default())?;
    println!("\n32x8 row-stochastic: {lo:.4} <= F={:.4} <= {hi:.4}", check.frobenius);
    println!(
        "nuclear={:.4}, lower_ok={}, upper_ok={}",
        check.nuclear, check.lower_ok, check.upper_ok
    );
    Ok(())
}
