//! Scores a small manifest through the CLI entry point, as `mnn batch` would.

use mnn_core::gen;
use mnn_core::io::npy::{self, Dtype};

fn main() -> mnn_core::error::Result<()> {
    let dir = tempfile::tempdir().expect("temp dir");
    let mut samples = Vec::new();
    for (i, rows) in [12usize, 20, 16].into_iter().enumerate() {
        let name = format!("s{i}.npy");
        npy::write_matrix(&dir.path().join(&name), &gen::standard_normal(rows, 8, i as u64), Dtype::F4)?;
        samples.push(format!(r#"{{"id":"s{i}","matrix_path":"{name}","length":{rows}}}"#));
    }
    let manifest = dir.path().join("manifest.json");
    let body = format!(r#"{{"model":"demo-1B","dataset":"toy","samples":[{}]}}"#, samples.join(","));
    std::fs::write(&manifest, body).expect("write manifest");

    let code = mnn_core::cli::dispatch([
        "mnn",
        "batch",
        "--manifest",
        manifest.to_str().unwrap(),
        "--metric",
        "mnn",
        "--metric",
        "matrix-entropy",
        "--format",
        "markdown",
    ]);
    std::process::exit(code);
}
