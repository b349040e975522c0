//! Writes a matrix as NPY and CSV, then reads both back.

use mnn_core::gen;
use mnn_core::io::npy::{self, Dtype};
use mnn_core::io::{load_matrix_auto, load_vector};

fn main() -> mnn_core::error::Result<()> {
    let dir = tempfile::tempdir().expect("temp dir");
    let x = gen::standard_normal(4, 3, 0);

    let f8 = dir.path().join("x.npy");
    npy::write_matrix(&f8, &x, Dtype::F8)?;
    assert_eq!(load_matrix_auto(&f8, None)?, x);

    let f4 = dir.path().join("x32.npy");
    npy::write_matrix(&f4, &x, Dtype::F4)?;
    let back = load_matrix_auto(&f4, None)?;
    println!("f4 max deviation: {:.2e}", max_diff(back.as_slice(), x.as_slice()));

    let csv = dir.path().join("x.csv");
    let text: String = x
        .row_iter()
        .map(|r| r.iter().map(|v| format!("{v:?}")).collect::<Vec<_>>().join(",") + "\n")
        .collect();
    std::fs::write(&csv, text).expect("write csv");
    assert_eq!(load_matrix_auto(&csv, None)?, x);

    let lp = dir.path().join("lp.npy");
    npy::write_vector(&lp, &[-0.1, -2.3, -0.7], Dtype::F8)?;
    println!("log-probs: {:?}", load_vector(&lp, None)?);
    println!("round trips ok");
    Ok(())
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
