//! Times MNN against matrix entropy. Pass sizes as arguments, e.g. `256 512 1024`.

use mnn_core::bench::{fit_loglog_slope, run_scaling_bench, BenchMetric};

fn main() -> mnn_core::error::Result<()> {
    let mut sizes: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    if sizes.is_empty() {
        sizes = vec![64, 128, 256];
    }
    let table = run_scaling_bench(&sizes, 3, 0)?;
    for (n, r) in table.ratio_summary() {
        println!("n={n:<5} mnn {:.2e}s  entropy {:.2e}s  ratio {:.1}", r.mnn, r.matrix_entropy, r.ratio);
    }
    for metric in BenchMetric::ALL {
        println!("slope {metric}: {:.2}", fit_loglog_slope(&table, metric)?);
    }
    table.write_csv(std::io::stdout().lock(), true)
}
