//! Wall-clock scaling benchmark: Matrix Nuclear-Norm against the eigensolver-based matrix
//! entropy on seeded `n × n` inputs, with median ratios and log-log slope fits.
//!
//! The timed region covers one full metric call (normalization included) and nothing
//! else; matrix generation and I/O happen outside it. Everything runs on the calling
//! thread.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gen;
use crate::matrix::Matrix;
use crate::mnn::{matrix_nuclear_norm, MnnConfig};
use crate::spectral::{sample_matrix_entropy, EigenConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BenchMetric {
    Mnn,
    MatrixEntropy,
}

impl BenchMetric {
    pub const ALL: [BenchMetric; 2] = [BenchMetric::Mnn, BenchMetric::MatrixEntropy];

    pub fn name(self) -> &'static str {
        match self {
            BenchMetric::Mnn => "mnn",
            BenchMetric::MatrixEntropy => "matrix_entropy",
        }
    }

    fn run(self, x: &Matrix) -> Result<f64> {
        match self {
            BenchMetric::Mnn => matrix_nuclear_norm(x, &MnnConfig::default()),
            BenchMetric::MatrixEntropy => sample_matrix_entropy(x, &EigenConfig::default()),
        }
    }
}

impl fmt::Display for BenchMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BenchMetric {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "mnn" => Ok(BenchMetric::Mnn),
            "matrix_entropy" | "matrix-entropy" => Ok(BenchMetric::MatrixEntropy),
            other => Err(format!("unknown bench metric '{other}'")),
        }
    }
}

/// One timed run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub metric: BenchMetric,
    pub size: usize,
    pub repeat: usize,
    pub seconds: f64,
    /// False when the eigensolver gave up; such runs are kept but left out of medians.
    #[serde(skip)]
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioSummary {
    pub mnn: f64,
    pub matrix_entropy: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BenchTable {
    pub records: Vec<BenchRecord>,
    /// Median seconds over converged repeats.
    pub medians: BTreeMap<(BenchMetric, usize), f64>,
    /// `matrix_entropy` median over `mnn` median, per size.
    pub ratios: BTreeMap<usize, f64>,
}

/// The seeded standard-normal input used for size `n`.
pub fn bench_matrix(n: usize, seed: u64) -> Matrix {
    gen::standard_normal(n, n, seed)
}

fn time_once(metric: BenchMetric, x: &Matrix) -> Result<(f64, bool)> {
    let start = Instant::now();
    let outcome = metric.run(x);
    let seconds = start.elapsed().as_secs_f64().max(1e-9);
    match outcome {
        Ok(v) => {
            std::hint::black_box(v);
            Ok((seconds, true))
        }
        Err(Error::NotConverged { .. }) => Ok((seconds, false)),
        Err(e) => Err(e),
    }
}

/// Times both metric pipelines at every size: one untimed warmup, then `repeats` runs each.
pub fn run_scaling_bench(sizes: &[usize], repeats: usize, seed: u64) -> Result<BenchTable> {
    if sizes.is_empty() {
        return Err(Error::InvalidInput("no sizes given".into()));
    }
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput("sizes must be strictly ascending".into()));
    }
    if sizes[0] < 2 {
        return Err(Error::InvalidInput("sizes must be at least 2".into()));
    }
    if repeats < 3 {
        return Err(Error::InvalidInput(format!(
            "need at least 3 repeats, got {repeats}"
        )));
    }

    let mut records = Vec::new();
    for &n in sizes {
        let x = bench_matrix(n, seed);
        for metric in BenchMetric::ALL {
            time_once(metric, &x)?;
            for repeat in 0..repeats {
                let (seconds, converged) = time_once(metric, &x)?;
                records.push(BenchRecord {
                    metric,
                    size: n,
                    repeat,
                    seconds,
                    converged,
                });
            }
        }
    }
    Ok(BenchTable::from_records(records))
}

impl BenchTable {
    pub fn from_records(records: Vec<BenchRecord>) -> BenchTable {
        let mut groups: BTreeMap<(BenchMetric, usize), Vec<f64>> = BTreeMap::new();
        for r in records.iter().filter(|r| r.converged) {
            groups.entry((r.metric, r.size)).or_default().push(r.seconds);
        }
        let medians: BTreeMap<_, _> = groups
            .into_iter()
            .map(|(k, mut v)| (k, median(&mut v)))
            .collect();
        let mut ratios = BTreeMap::new();
        for (&(metric, size), &m) in &medians {
            if metric != BenchMetric::Mnn {
                continue;
            }
            if let Some(&e) = medians.get(&(BenchMetric::MatrixEntropy, size)) {
                ratios.insert(size, e / m);
            }
        }
        BenchTable {
            records,
            medians,
            ratios,
        }
    }

    pub fn median(&self, metric: BenchMetric, size: usize) -> Option<f64> {
        self.medians.get(&(metric, size)).copied()
    }

    pub fn failed_repeats(&self) -> usize {
        self.records.iter().filter(|r| !r.converged).count()
    }

    /// Per-size medians and ratio, keyed by size.
    pub fn ratio_summary(&self) -> BTreeMap<usize, RatioSummary> {
        self.ratios
            .iter()
            .map(|(&size, &ratio)| {
                (
                    size,
                    RatioSummary {
                        mnn: self.median(BenchMetric::Mnn, size).unwrap(),
                        matrix_entropy: self.median(BenchMetric::MatrixEntropy, size).unwrap(),
                        ratio,
                    },
                )
            })
            .collect()
    }

    /// Writes converged records as `metric,size,repeat,seconds` rows.
    pub fn write_csv<W: Write>(&self, out: W, header: bool) -> Result<()> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
        let to_err = |e: csv::Error| Error::InvalidInput(format!("writing bench CSV: {e}"));
        if header {
            w.write_record(["metric", "size", "repeat", "seconds"])
                .map_err(to_err)?;
        }
        for r in self.records.iter().filter(|r| r.converged) {
            w.write_record([
                r.metric.name().to_string(),
                r.size.to_string(),
                r.repeat.to_string(),
                r.seconds.to_string(),
            ])
            .map_err(to_err)?;
        }
        w.flush().map_err(|e| Error::InvalidInput(format!("writing bench CSV: {e}")))
    }

    /// Appends to `path`, writing the header only when the file is new or empty.
    pub fn append_csv(&self, path: &Path) -> Result<()> {
        let fresh = std::fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
        let file = std::fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| Error::io(path, e))?;
        self.write_csv(file, fresh)
    }
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Least-squares slope of `ln(seconds)` against `ln(size)`.
pub fn loglog_slope(points: &[(usize, f64)]) -> Result<f64> {
    let mut sizes: Vec<usize> = points.iter().map(|p| p.0).collect();
    sizes.sort_unstable();
    sizes.dedup();
    if sizes.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "slope fit needs at least 3 distinct sizes, got {}",
            sizes.len()
        )));
    }
    let xs: Vec<f64> = points.iter().map(|p| (p.0 as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

/// Log-log slope of one metric's median timings.
pub fn fit_loglog_slope(table: &BenchTable, metric: BenchMetric) -> Result<f64> {
    let points: Vec<(usize, f64)> = table
        .medians
        .iter()
        .filter(|((m, _), _)| *m == metric)
        .map(|(&(_, size), &secs)| (size, secs))
        .collect();
    loglog_slope(&points)
}
