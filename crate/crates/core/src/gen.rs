//! Seeded matrix generators used by the benchmark harness, examples, and tests.
//!
//! All generators use ChaCha8 so a seed produces the same matrix on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::matrix::Matrix;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn build(rows: usize, cols: usize, data: Vec<f64>) -> Matrix {
    Matrix::new(rows, cols, data).expect("generator produced an invalid matrix")
}

/// Elements drawn uniformly from `[0, 1)`.
pub fn uniform(rows: usize, cols: usize, seed: u64) -> Matrix {
    let mut r = rng(seed);
    build(rows, cols, (0..rows * cols).map(|_| r.random::<f64>()).collect())
}

/// Elements drawn from the standard normal distribution.
pub fn standard_normal(rows: usize, cols: usize, seed: u64) -> Matrix {
    let mut r = rng(seed);
    build(
        rows,
        cols,
        (0..rows * cols).map(|_| r.sample(StandardNormal)).collect(),
    )
}

/// Symmetric `n × n` matrix with standard-normal upper triangle.
pub fn symmetric(n: usize, seed: u64) -> Matrix {
    let mut r = rng(seed);
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v: f64 = r.sample(StandardNormal);
            data[i * n + j] = v;
            data[j * n + i] = v;
        }
    }
    build(n, n, data)
}

/// Rows drawn uniformly and rescaled to sum to one.
pub fn row_stochastic(rows: usize, cols: usize, seed: u64) -> Matrix {
    let mut r = rng(seed);
    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows {
        let row: Vec<f64> = (0..cols).map(|_| r.random::<f64>() + 1e-3).collect();
        let total: f64 = row.iter().sum();
        data.extend(row.into_iter().map(|v| v / total));
    }
    build(rows, cols, data)
}

/// Row-stochastic matrix whose rows each put `peak_mass` on one randomly chosen column
/// and spread the remainder over the other columns with random weights.
///
/// For a fixed seed, the peak columns and the off-peak weights are the same at every
/// `peak_mass`, so a sweep over `peak_mass` moves one matrix family towards one-hot rows.
pub fn peaked_row_stochastic(rows: usize, cols: usize, peak_mass: f64, seed: u64) -> Matrix {
    assert!(cols >= 2, "need at least two categories");
    assert!((0.0..=1.0).contains(&peak_mass));
    let mut r = rng(seed);
    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows {
        let peak = r.random_range(0..cols);
        let weights: Vec<f64> = (0..cols).map(|_| r.random::<f64>() + 1e-3).collect();
        let off_total: f64 = weights
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != peak)
            .map(|(_, w)| w)
            .sum();
        data.extend(weights.iter().enumerate().map(|(j, w)| {
            if j == peak {
                peak_mass
            } else {
                (1.0 - peak_mass) * w / off_total
            }
        }));
    }
    build(rows, cols, data)
}
