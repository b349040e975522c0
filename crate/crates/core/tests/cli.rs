use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mnn_core::io::npy::{self, Dtype};
use mnn_core::matrix::Matrix;
use mnn_core::report::{BatchReport, MetricReport};
use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn mnn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mnn"))
        .args(args)
        .env_remove("MNN_JOBS")
        .output()
        .expect("spawn mnn")
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn oracle() -> Value {
    serde_json::from_str(&std::fs::read_to_string(fixture("oracle.json")).unwrap()).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn compute_matches_numpy_oracle() {
    let oracle = oracle();
    for id in ["s0", "s1", "s2"] {
        let input = fixture(&format!("{id}.npy"));
        let logprobs = fixture(&format!("{id}_logprobs.npy"));
        for (metric, file, tol) in [
            ("mnn", &input, 1e-12),
            ("matrix-entropy", &input, 1e-9),
            ("nuclear", &input, 1e-9),
            ("perplexity", &logprobs, 1e-12),
        ] {
            let v = stdout_json(&mnn(&["compute", "--metric", metric, "--input", path_str(file)]));
            let got = v["value"].as_f64().unwrap();
            let want = oracle[id][metric].as_f64().unwrap();
            assert!(
                (got - want).abs() <= tol * want.abs().max(1.0),
                "{id} {metric}: {got} vs {want}"
            );
            assert_eq!(v["metric"], metric);
        }
    }
}

#[test]
fn csv_and_npy_inputs_agree() {
    let npy = stdout_json(&mnn(&["compute", "--metric", "mnn", "--input", path_str(&fixture("s0.npy"))]));
    let csv = stdout_json(&mnn(&["compute", "--metric", "mnn", "--input", path_str(&fixture("s0.csv"))]));
    assert_eq!(npy["value"], csv["value"]);
    assert_eq!(csv["rows"], 12);
    assert_eq!(csv["cols"], 6);
}

#[test]
fn compute_output_formats() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("eye.npy");
    npy::write_matrix(&path, &Matrix::identity(2), Dtype::F8).unwrap();
    let out = mnn(&["compute", "--metric", "mnn", "--input", path_str(&path), "--format", "csv"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "metric,value\nmnn,0.9999999999999999\n");
    let out = mnn(&["compute", "--metric", "frobenius", "--input", path_str(&path), "--format", "markdown"]);
    assert!(String::from_utf8(out.stdout).unwrap().contains("| frobenius | 1.4142135623730951 |"));
    let v = stdout_json(&mnn(&["compute", "--metric", "bounds", "--input", path_str(&path)]));
    assert_eq!(v["bounds"]["lower_ok"], true);
    assert_eq!(v["bounds"]["upper_ok"], true);
}

#[test]
fn batch_agrees_with_per_file_compute() {
    let dir = tempfile::tempdir().unwrap();
    let report_path = dir.path().join("report.json");
    let out = mnn(&[
        "batch",
        "--manifest",
        path_str(&fixture("manifest.json")),
        "--metric",
        "mnn",
        "--metric",
        "cross-entropy",
        "--out",
        path_str(&report_path),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = BatchReport::load(&report_path).unwrap();
    assert_eq!(report.model, "Tiny-0.1B");
    let mnn_report = report.metric("mnn").unwrap();
    let ids: Vec<&str> = mnn_report.per_sample.iter().map(|s| s.id.as_str()).collect();
    assert_eq!(ids, ["s0", "s1", "s2"]);
    for s in &mnn_report.per_sample {
        let single = stdout_json(&mnn(&[
            "compute",
            "--metric",
            "mnn",
            "--input",
            path_str(&fixture(&format!("{}.npy", s.id))),
        ]));
        assert_eq!(single["value"].as_f64().unwrap(), s.value);
    }
    assert!(report.metric("cross-entropy").is_some());
}

#[test]
fn batch_length_from_manifest_divides_by_manifest_length() {
    let dir = tempfile::tempdir().unwrap();
    let x = mnn_core::gen::standard_normal(8, 4, 1);
    npy::write_matrix(&dir.path().join("a.npy"), &x, Dtype::F8).unwrap();
    let manifest = dir.path().join("m.json");
    std::fs::write(
        &manifest,
        r#"{"model":"m","dataset":"d","samples":[{"id":"a","matrix_path":"a.npy","length":16}]}"#,
    )
    .unwrap();
    let rows = stdout_json(&mnn(&["batch", "--manifest", path_str(&manifest), "--metric", "mnn"]));
    let from_manifest = stdout_json(&mnn(&[
        "batch",
        "--manifest",
        path_str(&manifest),
        "--metric",
        "mnn",
        "--length-from",
        "manifest",
    ]));
    let a = rows["reports"][0]["mean"].as_f64().unwrap();
    let b = from_manifest["reports"][0]["mean"].as_f64().unwrap();
    assert!((b - a / 2.0).abs() < 1e-15);
}

#[test]
fn rank_groups_by_cohort() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for (model, alpaca, arena) in [
        ("QWEN 2-72B", 0.5261, 0.4689),
        ("Llama 2-70B", 0.3862, 0.4086),
        ("Gemma-7B", 0.3759, 0.3998),
        ("DeepSeek-7B", 0.3352, 0.4357),
    ] {
        for (dataset, score) in [("alpaca", alpaca), ("arena", arena)] {
            let report = BatchReport {
                model: model.into(),
                dataset: dataset.into(),
                reports: vec![MetricReport::from_score(model, dataset, "mnn", score)],
            };
            let path = dir.path().join(format!("{model}-{dataset}.json"));
            std::fs::write(&path, serde_json::to_string(&report).unwrap()).unwrap();
            files.push(path);
        }
    }
    let mut args = vec!["rank", "--metric", "mnn", "--group-by", "size-cohort"];
    args.extend(files.iter().map(|p| path_str(p)));
    let v = stdout_json(&mnn(&args));
    assert_eq!(v[0]["cohort"], "1B-10B");
    assert_eq!(v[0]["entries"][0]["model"], "DeepSeek-7B");
    assert_eq!(v[1]["cohort"], "10B-100B");
    assert_eq!(v[1]["entries"][0]["model"], "Llama 2-70B");
    assert_eq!(v[1]["entries"][1]["model"], "QWEN 2-72B");

    args.extend(["--format", "markdown"]);
    let md = String::from_utf8(mnn(&args).stdout).unwrap();
    assert!(md.contains("| DeepSeek-7B | 0.3352 | 0.4357 | 0.3855 | 1 |"), "{md}");
}

#[test]
fn bench_appends_one_header() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("t.csv");
    for _ in 0..2 {
        let out = mnn(&["bench", "--sizes", "16,32", "--repeats", "3", "--csv", path_str(&csv)]);
        let v = stdout_json(&out);
        assert!(v["16"]["ratio"].as_f64().unwrap() > 0.0);
    }
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "metric,size,repeat,seconds");
    assert_eq!(lines.len(), 1 + 2 * 2 * 2 * 3);
    assert_eq!(lines.iter().filter(|l| l.starts_with("metric")).count(), 1);
}

#[test]
fn stability_from_reports() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for (i, v) in [0.5684, 0.5670, 0.5676, 0.5699, 0.5693].iter().enumerate() {
        let report = BatchReport {
            model: "m".into(),
            dataset: "d".into(),
            reports: vec![MetricReport::from_score("m", "d", "mnn", *v)],
        };
        let path = dir.path().join(format!("r{i}.json"));
        std::fs::write(&path, serde_json::to_string(&report).unwrap()).unwrap();
        files.push(path);
    }
    let mut args = vec!["stability", "--reports"];
    args.extend(files.iter().map(|p| path_str(p)));
    let v = stdout_json(&mnn(&args));
    assert_eq!(v["count"], 5);
    assert!((v["std_sample"].as_f64().unwrap() - 0.001188696765369547).abs() < 1e-12);
    assert!((v["std_population"].as_f64().unwrap() - 0.00106320270880017).abs() < 1e-12);
}

#[test]
fn exit_codes() {
    assert_eq!(mnn(&["--help"]).status.code(), Some(0));
    assert_eq!(mnn(&["--version"]).status.code(), Some(0));
    assert_eq!(mnn(&["compute", "--help"]).status.code(), Some(0));
    assert_eq!(mnn(&[]).status.code(), Some(1));
    assert_eq!(mnn(&["compute", "--metric", "nope", "--input", "x"]).status.code(), Some(1));
    assert_eq!(
        mnn(&["batch", "--manifest", path_str(&fixture("manifest.json")), "--metric", "mnn", "--jobs", "0"])
            .status
            .code(),
        Some(1)
    );

    let dir = tempfile::tempdir().unwrap();
    let flat = dir.path().join("flat.npy");
    npy::write_matrix(&flat, &Matrix::from_rows(&[[3.0, 3.0], [3.0, 3.0]]).unwrap(), Dtype::F8).unwrap();
    let out = mnn(&["compute", "--metric", "mnn", "--input", path_str(&flat)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("degenerate sample"));

    let bad = dir.path().join("bad.npy");
    std::fs::write(&bad, b"not an npy file").unwrap();
    assert_eq!(mnn(&["compute", "--metric", "mnn", "--input", path_str(&bad)]).status.code(), Some(2));

    let not_stochastic = dir.path().join("ns.csv");
    std::fs::write(&not_stochastic, "1,1\n0,1\n").unwrap();
    let out = mnn(&["compute", "--metric", "shannon-entropy", "--input", path_str(&not_stochastic)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn jobs_env_var_is_honoured() {
    let out = Command::new(env!("CARGO_BIN_EXE_mnn"))
        .args(["batch", "--manifest", path_str(&fixture("manifest.json")), "--metric", "mnn"])
        .env("MNN_JOBS", "3")
        .output()
        .unwrap();
    let reference = mnn(&["batch", "--manifest", path_str(&fixture("manifest.json")), "--metric", "mnn"]);
    assert!(out.status.success());
    assert_eq!(out.stdout, reference.stdout);
    let zero = Command::new(env!("CARGO_BIN_EXE_mnn"))
        .args(["batch", "--manifest", path_str(&fixture("manifest.json")), "--metric", "mnn"])
        .env("MNN_JOBS", "0")
        .output()
        .unwrap();
    assert_eq!(zero.status.code(), Some(1));
}
