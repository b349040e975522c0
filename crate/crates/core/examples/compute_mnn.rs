//! Matrix Nuclear-Norm of a hidden-state matrix, with and without overrides.

use mnn_core::gen;
use mnn_core::mnn::{matrix_nuclear_norm, MnnConfig};

fn main() -> mnn_core::error::Result<()> {
    // 48 tokens of 16-dimensional "hidden states".
    let x = gen::standard_normal(48, 16, 7);

    let default = matrix_nuclear_norm(&x, &MnnConfig::default())?;
    let top4 = matrix_nuclear_norm(&x, &MnnConfig::default().with_top_d(4))?;
    let truncated = matrix_nuclear_norm(&x, &MnnConfig::default().with_length(64))?;

    println!("mnn (D = min(rows, cols)) = {default:.6}");
    println!("mnn (D = 4)               = {top4:.6}");
    println!("mnn (length 64)           = {truncated:.6}");
    Ok(())
}
