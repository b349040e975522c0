//! How closely column norms track singular values as rows approach one-hot.

use mnn_core::gen;
use mnn_core::mnn::{approx_nuclear_norm, approx_singular_values, MnnConfig};
use mnn_core::spectral::{exact_nuclear_norm, singular_values, EigenConfig};

fn main() -> mnn_core::error::Result<()> {
    let eig = EigenConfig::default();
    let cfg = MnnConfig::default().with_top_d(8);

    println!("{:>6} {:>12} {:>12} {:>10}", "peak", "exact", "approx", "rel err");
    for peak in [0.5, 0.9, 0.99, 0.999] {
        let a = gen::peaked_row_stochastic(64, 8, peak, 1);
        let exact = exact_nuclear_norm(&a, &eig)?;
        let approx = approx_nuclear_norm(&a, &cfg)?;
        println!(
            "{peak:>6} {exact:>12.6} {approx:>12.6} {:>10.2e}",
            (approx - exact).abs() / exact
        );
    }

    let a = gen::peaked_row_stochastic(64, 8, 0.99, 5);
    let exact = singular_values(&a, &eig).require_converged()?.values;
    println!("\nsingular values vs column norms at peak 0.99:");
    for (s, c) in exact.iter().zip(approx_singular_values(&a)) {
        println!("  {s:.6}  {c:.6}");
    }
    Ok(())
}
