//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.
//!
//! Run with `cargo test --test acceptance` (the test profile is optimized).

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use mnn_core::bench::{fit_loglog_slope, run_scaling_bench, BenchMetric};
use mnn_core::gen;
use mnn_core::matrix::Matrix;
use mnn_core::mnn::{approx_nuclear_norm, matrix_nuclear_norm, MnnConfig};
use mnn_core::prob::{self, LogProbSequence};
use mnn_core::report::{aggregate_scores, round_half_up, MetricReport};
use mnn_core::spectral::{dataset_matrix_entropy, exact_nuclear_norm, EigenConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Criterion = (&'static str, Duration, fn() -> Outcome);

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

fn run(name: &str, budget: Duration, check: fn() -> Outcome) -> bool {
    let start = Instant::now();
    let out = check();
    let elapsed = start.elapsed();
    let in_budget = elapsed <= budget;
    let ok = out.ok && in_budget;
    println!(
        "{} {name}: {} [{:.2}s / budget {:.0}s{}]",
        if ok { "PASS" } else { "FAIL" },
        out.detail,
        elapsed.as_secs_f64(),
        budget.as_secs_f64(),
        if in_budget { "" } else { ", over budget" },
    );
    ok
}

fn oracle_equivalence() -> Outcome {
    let eig = EigenConfig::default();
    let top8 = MnnConfig::default().with_top_d(8);
    let levels = [0.5, 0.9, 0.99, 0.999];
    let mut mean_errors = Vec::new();
    let mut worst_at_top = 0.0f64;
    for &p in &levels {
        let mut total = 0.0;
        for seed in 0..20u64 {
            let a = gen::peaked_row_stochastic(64, 8, p, seed);
            let exact = exact_nuclear_norm(&a, &eig).expect("exact nuclear norm");
            let approx = approx_nuclear_norm(&a, &top8).expect("approx nuclear norm");
            let err = (approx - exact).abs() / exact;
            total += err;
            if p == 0.999 {
                worst_at_top = worst_at_top.max(err);
            }
        }
        mean_errors.push(total / 20.0);
    }
    let monotone = mean_errors.windows(2).all(|w| w[1] <= w[0]);
    outcome(
        worst_at_top <= 0.01 && monotone,
        format!(
            "max rel err at 0.999 = {worst_at_top:.2e} (<= 1e-2); mean err by peak {:?} non-increasing = {monotone}",
            mean_errors.iter().map(|e| format!("{e:.2e}")).collect::<Vec<_>>()
        ),
    )
}

fn entropy_monotonicity() -> Outcome {
    let mut worst_margin = f64::INFINITY;
    for c in [2usize, 8, 64] {
        let mut prev: Option<(f64, f64)> = None;
        for k in 0..=10 {
            let t = k as f64 / 10.0;
            let row: Vec<f64> = (0..c)
                .map(|j| (1.0 - t) / c as f64 + if j == 0 { t } else { 0.0 })
                .collect();
            let a = Matrix::from_rows(&[row]).expect("row");
            let h = prob::shannon_entropy(&a).expect("entropy");
            let f = prob::frobenius_norm(&a);
            if let Some((ph, pf)) = prev {
                worst_margin = worst_margin.min(ph - h).min(f - pf);
            }
            prev = Some((h, f));
        }
    }
    outcome(
        worst_margin > 1e-12,
        format!("smallest step margin = {worst_margin:.3e} (> 1e-12) over C in {{2, 8, 64}}"),
    )
}

fn norm_bounds() -> Outcome {
    let eig = EigenConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut failures = Vec::new();
    for i in 0..500u64 {
        let rows = rng.random_range(2..=128);
        let cols = rng.random_range(2..=64);
        let a = gen::row_stochastic(rows, cols, 1000 + i);
        let (lo, hi) = prob::frobenius_bounds(rows, cols);
        let f = prob::frobenius_norm(&a);
        let eq3 = lo <= f + prob::BOUND_SLACK && f <= hi + prob::BOUND_SLACK;
        let check = prob::nuclear_bounds_check(&a, &eig).expect("bounds check");
        if !(eq3 && check.lower_ok && check.upper_ok && check.row_stochastic) {
            failures.push(format!("#{i} {rows}x{cols}"));
        }
    }
    outcome(
        failures.is_empty(),
        format!("500 row-stochastic matrices up to 128x64, failures: {failures:?}"),
    )
}

fn exactness_fixtures() -> Outcome {
    let eig = EigenConfig::default();
    let mnn = matrix_nuclear_norm(&Matrix::identity(2), &MnnConfig::default()).unwrap();
    let nuc = exact_nuclear_norm(&Matrix::diag(&[3.0, 4.0]), &eig).unwrap();
    let ppl = prob::perplexity(&LogProbSequence::new(vec![0.5f64.ln(), 0.25f64.ln()]).unwrap());
    let iso = Matrix::from_rows(&[[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]]).unwrap();
    let ent = dataset_matrix_entropy(&[iso.clone(), iso], &eig).unwrap();
    let checks = [
        ("mnn(I2)", mnn, 1.0),
        ("nuclear(diag(3,4))", nuc, 7.0),
        ("perplexity", ppl, 2.0 * 2f64.sqrt()),
        ("matrix entropy (isotropic)", ent, 1.0),
    ];
    let worst = checks
        .iter()
        .map(|(_, got, want)| (got - want).abs())
        .fold(0.0, f64::max);
    let detail = checks
        .iter()
        .map(|(n, got, _)| format!("{n}={got}"))
        .collect::<Vec<_>>()
        .join(", ");
    outcome(worst <= 1e-9, format!("{detail}; max abs err {worst:.1e}"))
}

fn complexity_separation() -> Outcome {
    let sizes = [256, 512, 1024, 2048];
    let table = match run_scaling_bench(&sizes, 5, 0) {
        Ok(t) => t,
        Err(e) => return outcome(false, format!("bench failed: {e}")),
    };
    let summary = table.ratio_summary();
    let ratios: Vec<f64> = sizes.iter().map(|n| summary[n].ratio).collect();
    let non_decreasing = ratios.windows(2).all(|w| w[1] >= w[0]);
    let last = *ratios.last().unwrap();
    let slope_entropy = fit_loglog_slope(&table, BenchMetric::MatrixEntropy).unwrap_or(f64::NAN);
    let slope_mnn = fit_loglog_slope(&table, BenchMetric::Mnn).unwrap_or(f64::NAN);
    let gap = slope_entropy - slope_mnn;
    outcome(
        non_decreasing && last >= 5.0 && gap >= 0.5 && table.failed_repeats() == 0,
        format!(
            "ratios {:?} non-decreasing = {non_decreasing}, ratio@2048 = {last:.1} (>= 5); slopes entropy {slope_entropy:.2} mnn {slope_mnn:.2}, gap {gap:.2} (>= 0.5)",
            ratios.iter().map(|r| format!("{r:.1}")).collect::<Vec<_>>()
        ),
    )
}

fn ranking_reproduction() -> Outcome {
    // (model, Alpaca, Arena, published average), in published rank order.
    let table = [
        ("DeepSeek-7B", 0.3352, 0.4357, "0.3855"),
        ("Gemma-7B", 0.3759, 0.3998, "0.3879"),
        ("Vicuna-7B", 0.4623, 0.4824, "0.4724"),
        ("LLaMA 2-7B", 0.4648, 0.5038, "0.4843"),
        ("QWEN 1.5-7B", 0.4866, 0.5165, "0.5016"),
        ("Mistral-7B", 0.4980, 0.5126, "0.5053"),
        ("QWEN 2-7B", 0.5989, 0.5751, "0.5870"),
    ];
    let mut reports = Vec::new();
    // Feed the models in reverse so the order has to come from the scores.
    for (model, alpaca, arena, _) in table.iter().rev() {
        reports.push(MetricReport::from_score(*model, "alpaca", "mnn", *alpaca));
        reports.push(MetricReport::from_score(*model, "arena", "mnn", *arena));
    }
    let ranked = aggregate_scores(&reports).expect("aggregate");
    let mut mismatches = Vec::new();
    for (i, (model, _, _, avg)) in table.iter().enumerate() {
        let e = &ranked[i];
        let got = round_half_up(e.avg, 4);
        if e.model_label != *model || got != *avg || e.rank != i + 1 {
            mismatches.push(format!("#{} {} {got} (want {model} {avg})", i + 1, e.model_label));
        }
    }
    outcome(
        mismatches.is_empty() && ranked.len() == table.len(),
        format!("7 models, 4-decimal averages and order, mismatches: {mismatches:?}"),
    )
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn batch_bytes(jobs: &str) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_mnn"))
        .arg("batch")
        .arg("--manifest")
        .arg(fixture("manifest.json"))
        .args(["--metric", "mnn", "--metric", "matrix-entropy", "--metric", "perplexity"])
        .args(["--jobs", jobs])
        .env_remove("MNN_JOBS")
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(String::from_utf8_lossy(&out.stderr).into_owned());
    }
    Ok(out.stdout)
}

fn batch_determinism() -> Outcome {
    let reference = match batch_bytes("1") {
        Ok(b) => b,
        Err(e) => return outcome(false, format!("batch failed: {e}")),
    };
    let mut runs = 1;
    let mut identical = true;
    for jobs in ["1", "1", "1", "1", "4", "4", "4", "4", "4"] {
        match batch_bytes(jobs) {
            Ok(b) => identical &= b == reference,
            Err(e) => return outcome(false, format!("batch failed: {e}")),
        }
        runs += 1;
    }
    outcome(
        identical,
        format!("{runs} runs (5 with --jobs 1, 5 with --jobs 4) on a 3-sample manifest byte-identical = {identical}"),
    )
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("oracle equivalence", Duration::from_secs(10), oracle_equivalence),
        ("entropy/frobenius monotonicity", Duration::from_secs(1), entropy_monotonicity),
        ("norm bounds", Duration::from_secs(60), norm_bounds),
        ("exactness fixtures", Duration::from_secs(1), exactness_fixtures),
        ("complexity separation", Duration::from_secs(600), complexity_separation),
        ("ranking reproduction", Duration::from_secs(1), ranking_reproduction),
        ("batch determinism", Duration::from_secs(60), batch_determinism),
    ];
    let passed = criteria
        .iter()
        .map(|(name, budget, check)| run(name, *budget, *check))
        .filter(|ok| *ok)
        .count();
    println!("acceptance: {passed}/{} criteria passed", criteria.len());
    if passed != criteria.len() {
        std::process::exit(1);
    }
}
