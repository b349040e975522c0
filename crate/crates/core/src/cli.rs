//! Command-line front end. The `mnn` binary is a thin wrapper around [`dispatch`].
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on data or convergence errors.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::bench::{fit_loglog_slope, run_scaling_bench, BenchMetric, BenchTable};
use crate::error::Error;
use crate::io::{self, Format, Sample, SampleManifest};
use crate::matrix::Matrix;
use crate::mnn::{approx_nuclear_norm, matrix_nuclear_norm, MnnConfig};
use crate::prob::{self, BoundsCheck, LogProbSequence};
use crate::report::{
    aggregate_by_cohort, aggregate_scores, render_csv, render_markdown, round_half_up,
    stability_report, BatchReport, MetricReport, RankEntry, SampleValue,
};
use crate::spectral::{self, EigenConfig, RANK_TOL};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "mnn",
    version,
    about = "Matrix Nuclear-Norm and spectral baselines for language-model hidden states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Score one matrix (or log-prob vector) with one metric.
    Compute(ComputeArgs),
    /// Score every sample of a manifest with one or more metrics.
    Batch(BatchArgs),
    /// Time Matrix Nuclear-Norm against matrix entropy across matrix sizes.
    Bench(BenchArgs),
    /// Rank models from batch report files.
    Rank(RankArgs),
    /// Mean and standard deviations of repeated measurements.
    Stability(StabilityArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Metric {
    /// Length-normalized Matrix Nuclear-Norm of raw hidden states
    Mnn,
    /// Top-D sum of column L2 norms of the matrix as given
    ApproxNuclear,
    /// Exact nuclear norm (sum of singular values)
    Nuclear,
    Frobenius,
    /// Numerical rank
    Rank,
    /// Mean row entropy of a row-stochastic matrix
    ShannonEntropy,
    /// Normalized matrix entropy of hidden states
    MatrixEntropy,
    /// Norm sandwich check on the exact nuclear norm
    Bounds,
    /// Mean negative log-likelihood of a log-prob vector
    CrossEntropy,
    /// exp(cross-entropy) of a log-prob vector
    Perplexity,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Mnn => "mnn",
            Metric::ApproxNuclear => "approx-nuclear",
            Metric::Nuclear => "nuclear",
            Metric::Frobenius => "frobenius",
            Metric::Rank => "rank",
            Metric::ShannonEntropy => "shannon-entropy",
            Metric::MatrixEntropy => "matrix-entropy",
            Metric::Bounds => "bounds",
            Metric::CrossEntropy => "cross-entropy",
            Metric::Perplexity => "perplexity",
        }
    }

    fn uses_logprobs(self) -> bool {
        matches!(self, Metric::CrossEntropy | Metric::Perplexity)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    #[default]
    Json,
    Csv,
    Markdown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum InputFormat {
    Npy,
    Csv,
}

impl From<InputFormat> for Format {
    fn from(f: InputFormat) -> Format {
        match f {
            InputFormat::Npy => Format::Npy,
            InputFormat::Csv => Format::Csv,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
enum LengthFrom {
    /// Divide by the matrix row count
    #[default]
    Rows,
    /// Divide by the manifest's per-sample length
    Manifest,
}

#[derive(Debug, Args)]
struct MetricOptions {
    /// Number of leading column norms kept by mnn/approx-nuclear (default min(rows, cols))
    #[arg(long)]
    top_d: Option<usize>,
    /// Relative singular-value cutoff for `rank`
    #[arg(long, default_value_t = RANK_TOL)]
    rank_tol: f64,
}

#[derive(Debug, Args)]
struct ComputeArgs {
    #[arg(long, value_enum)]
    metric: Metric,
    #[arg(long)]
    input: PathBuf,
    /// Input file format; inferred from the extension when omitted
    #[arg(long, value_enum)]
    input_format: Option<InputFormat>,
    /// Sequence length for mnn (default: row count)
    #[arg(long)]
    length: Option<usize>,
    #[command(flatten)]
    options: MetricOptions,
    #[arg(long, value_enum, default_value_t)]
    format: OutputFormat,
}

#[derive(Debug, Args)]
struct BatchArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Metric to compute; repeat for several
    #[arg(long = "metric", value_enum, required = true)]
    metrics: Vec<Metric>,
    /// Write the report here instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for per-sample evaluation
    #[arg(long, env = "MNN_JOBS", default_value_t = 1)]
    jobs: usize,
    #[arg(long, value_enum, default_value_t)]
    length_from: LengthFrom,
    #[command(flatten)]
    options: MetricOptions,
    #[arg(long, value_enum, default_value_t)]
    format: OutputFormat,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Square matrix sizes, strictly ascending
    #[arg(long, value_delimiter = ',', default_values_t = [256usize, 512, 1024, 2048])]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    repeats: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Append per-run timings to this CSV file
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    format: OutputFormat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum GroupBy {
    SizeCohort,
}

#[derive(Debug, Args)]
struct RankArgs {
    /// Batch report JSON files
    #[arg(required = true)]
    reports: Vec<PathBuf>,
    #[arg(long, default_value = "mnn")]
    metric: String,
    #[arg(long, value_enum)]
    group_by: Option<GroupBy>,
    #[arg(long, value_enum, default_value_t)]
    format: OutputFormat,
}

#[derive(Debug, Args)]
struct StabilityArgs {
    /// Comma-separated measurements
    #[arg(long, value_delimiter = ',', conflicts_with = "reports", required_unless_present = "reports")]
    values: Vec<f64>,
    /// Batch report files; the mean of `--metric` in each is one measurement
    #[arg(long, num_args = 1..)]
    reports: Vec<PathBuf>,
    #[arg(long, default_value = "mnn")]
    metric: String,
    #[arg(long, value_enum, default_value_t)]
    format: OutputFormat,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Data(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Data(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `argv` (program name first), runs the subcommand, and returns the exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// Like [`dispatch`] with explicit output streams.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };
    let result = match cli.command {
        Command::Compute(a) => compute(a, out),
        Command::Batch(a) => batch(a, out),
        Command::Bench(a) => bench(a, out),
        Command::Rank(a) => rank(a, out),
        Command::Stability(a) => stability(a, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(CliError::Data(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_DATA
        }
    }
}

fn emit(out: &mut dyn Write, text: &str) -> CliResult<()> {
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::Data(Error::io("<stdout>", e)))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable output");
    s.push('\n');
    s
}

fn mnn_config(options: &MetricOptions, length: Option<usize>) -> CliResult<MnnConfig> {
    if options.top_d == Some(0) {
        return Err(CliError::Usage("--top-d must be at least 1".into()));
    }
    if length == Some(0) {
        return Err(CliError::Usage("--length must be at least 1".into()));
    }
    Ok(MnnConfig {
        top_d: options.top_d,
        length_override: length,
    })
}

/// Scalar value of a matrix metric, plus the bounds detail when asked for.
fn matrix_metric(
    metric: Metric,
    x: &Matrix,
    config: &MnnConfig,
    rank_tol: f64,
) -> crate::error::Result<(f64, Option<BoundsCheck>)> {
    let eig = EigenConfig::default();
    let value = match metric {
        Metric::Mnn => matrix_nuclear_norm(x, config)?,
        Metric::ApproxNuclear => approx_nuclear_norm(x, config)?,
        Metric::Nuclear => spectral::exact_nuclear_norm(x, &eig)?,
        Metric::Frobenius => prob::frobenius_norm(x),
        Metric::Rank => spectral::numerical_rank(x, rank_tol, &eig)? as f64,
        Metric::ShannonEntropy => prob::shannon_entropy(x)?,
        Metric::MatrixEntropy => spectral::sample_matrix_entropy(x, &eig)?,
        Metric::Bounds => {
            let check = prob::nuclear_bounds_check(x, &eig)?;
            return Ok((check.nuclear, Some(check)));
        }
        Metric::CrossEntropy | Metric::Perplexity => unreachable!("log-prob metric"),
    };
    Ok((value, None))
}

fn logprob_metric(metric: Metric, values: Vec<f64>) -> crate::error::Result<f64> {
    let lp = LogProbSequence::new(values)?;
    Ok(match metric {
        Metric::CrossEntropy => prob::cross_entropy(&lp),
        Metric::Perplexity => prob::perplexity(&lp),
        _ => unreachable!("matrix metric"),
    })
}

fn with_path(path: &Path, e: Error) -> Error {
    match e {
        Error::Io { .. } | Error::Npy { .. } | Error::Csv { .. } => e,
        other => Error::InvalidInput(format!("{}: {other}", path.display())),
    }
}

#[derive(Serialize)]
struct ComputeOutput {
    metric: &'static str,
    value: f64,
    input: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    rows: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cols: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bounds: Option<BoundsOutput>,
}

#[derive(Serialize)]
struct BoundsOutput {
    frobenius: f64,
    nuclear: f64,
    lower_ok: bool,
    upper_ok: bool,
    d_min: usize,
    row_stochastic: bool,
}

impl From<BoundsCheck> for BoundsOutput {
    fn from(b: BoundsCheck) -> Self {
        BoundsOutput {
            frobenius: b.frobenius,
            nuclear: b.nuclear,
            lower_ok: b.lower_ok,
            upper_ok: b.upper_ok,
            d_min: b.d_min,
            row_stochastic: b.row_stochastic,
        }
    }
}

fn compute(args: ComputeArgs, out: &mut dyn Write) -> CliResult<()> {
    let config = mnn_config(&args.options, args.length)?;
    let format = args.input_format.map(Format::from);
    let path = &args.input;
    let output = if args.metric.uses_logprobs() {
        let values = io::load_vector(path, format)?;
        let len = values.len();
        let value = logprob_metric(args.metric, values).map_err(|e| with_path(path, e))?;
        ComputeOutput {
            metric: args.metric.name(),
            value,
            input: path.display().to_string(),
            rows: Some(len),
            cols: None,
            bounds: None,
        }
    } else {
        let x = io::load_matrix_auto(path, format)?;
        let (value, bounds) = matrix_metric(args.metric, &x, &config, args.options.rank_tol)
            .map_err(|e| with_path(path, e))?;
        ComputeOutput {
            metric: args.metric.name(),
            value,
            input: path.display().to_string(),
            rows: Some(x.rows()),
            cols: Some(x.cols()),
            bounds: bounds.map(BoundsOutput::from),
        }
    };
    let text = match args.format {
        OutputFormat::Json => to_json(&output),
        OutputFormat::Csv => format!("metric,value\n{},{}\n", output.metric, output.value),
        OutputFormat::Markdown => format!(
            "| metric | value |\n|---|---:|\n| {} | {} |\n",
            output.metric, output.value
        ),
    };
    emit(out, &text)
}

fn score_sample(
    sample: &Sample,
    metrics: &[Metric],
    options: &MetricOptions,
    length_from: LengthFrom,
) -> crate::error::Result<Vec<f64>> {
    let needs_matrix = metrics.iter().any(|m| !m.uses_logprobs());
    let matrix = if needs_matrix {
        Some(io::load_matrix_auto(&sample.matrix_path, None)?)
    } else {
        None
    };
    let length = match length_from {
        LengthFrom::Rows => None,
        LengthFrom::Manifest => Some(sample.length),
    };
    let config = MnnConfig {
        top_d: options.top_d,
        length_override: length,
    };
    let annotate = |e: Error| match e {
        Error::Io { .. } | Error::Npy { .. } | Error::Csv { .. } => e,
        other => Error::InvalidInput(format!("sample '{}': {other}", sample.id)),
    };
    metrics
        .iter()
        .map(|&m| {
            if m.uses_logprobs() {
                let path = sample.logprobs_path.as_ref().ok_or_else(|| {
                    Error::InvalidInput(format!(
                        "sample '{}' has no logprobs_path but {} was requested",
                        sample.id,
                        m.name()
                    ))
                })?;
                let values = io::load_vector(path, None)?;
                logprob_metric(m, values).map_err(annotate)
            } else {
                let x = matrix.as_ref().expect("matrix loaded above");
                matrix_metric(m, x, &config, options.rank_tol)
                    .map(|(v, _)| v)
                    .map_err(annotate)
            }
        })
        .collect()
}

/// Scores every manifest sample and assembles one report per metric, in manifest order.
fn build_batch_report(
    manifest: &SampleManifest,
    metrics: &[Metric],
    options: &MetricOptions,
    length_from: LengthFrom,
    jobs: usize,
) -> CliResult<BatchReport> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {jobs} workers: {e}")))?;
    let scores: Vec<Vec<f64>> = pool.install(|| {
        manifest
            .samples
            .par_iter()
            .map(|s| score_sample(s, metrics, options, length_from))
            .collect::<crate::error::Result<Vec<_>>>()
    })?;

    let mut reports = Vec::with_capacity(metrics.len());
    for (k, metric) in metrics.iter().enumerate() {
        let per_sample = manifest
            .samples
            .iter()
            .zip(&scores)
            .map(|(s, values)| SampleValue {
                id: s.id.clone(),
                value: values[k],
            })
            .collect();
        reports.push(MetricReport::new(
            &manifest.model_label,
            &manifest.dataset_label,
            metric.name(),
            per_sample,
        )?);
    }
    Ok(BatchReport {
        model: manifest.model_label.clone(),
        dataset: manifest.dataset_label.clone(),
        reports,
    })
}

fn batch(args: BatchArgs, out: &mut dyn Write) -> CliResult<()> {
    if args.jobs == 0 {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    mnn_config(&args.options, None)?;
    let mut metrics = Vec::new();
    for m in &args.metrics {
        if !metrics.contains(m) {
            metrics.push(*m);
        }
    }
    let manifest = SampleManifest::load(&args.manifest)?;
    if manifest.samples.is_empty() {
        return Err(CliError::Data(Error::Manifest {
            path: args.manifest.clone(),
            message: "no samples".into(),
        }));
    }
    let report = build_batch_report(&manifest, &metrics, &args.options, args.length_from, args.jobs)?;

    let text = match args.format {
        OutputFormat::Json => to_json(&report),
        OutputFormat::Csv => {
            let mut s = String::from("sample,metric,value\n");
            for r in &report.reports {
                for v in &r.per_sample {
                    s.push_str(&format!("{},{},{}\n", v.id, r.metric, v.value));
                }
            }
            s
        }
        OutputFormat::Markdown => {
            let mut s = format!(
                "**{}** on **{}**\n\n| metric | mean | samples |\n|---|---:|---:|\n",
                report.model, report.dataset
            );
            for r in &report.reports {
                s.push_str(&format!(
                    "| {} | {} | {} |\n",
                    r.metric,
                    round_half_up(r.mean, 4),
                    r.count
                ));
            }
            s
        }
    };
    match &args.out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Data(Error::io(path, e))),
        None => emit(out, &text),
    }
}

fn bench(args: BenchArgs, out: &mut dyn Write) -> CliResult<()> {
    if args.repeats < 3 {
        return Err(CliError::Usage("--repeats must be at least 3".into()));
    }
    if args.sizes.is_empty() || args.sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::Usage("--sizes must be non-empty and strictly ascending".into()));
    }
    if args.sizes[0] < 2 {
        return Err(CliError::Usage("--sizes must all be at least 2".into()));
    }
    let table = run_scaling_bench(&args.sizes, args.repeats, args.seed)?;
    if let Some(path) = &args.csv {
        table.append_csv(path)?;
    }
    let text = match args.format {
        OutputFormat::Json => to_json(&table.ratio_summary()),
        OutputFormat::Csv => {
            let mut buf = Vec::new();
            table.write_csv(&mut buf, true)?;
            String::from_utf8(buf).expect("ASCII CSV")
        }
        OutputFormat::Markdown => bench_markdown(&table),
    };
    emit(out, &text)
}

fn bench_markdown(table: &BenchTable) -> String {
    let mut s = String::from("| n | mnn (s) | matrix entropy (s) | ratio |\n|---:|---:|---:|---:|\n");
    for (size, r) in table.ratio_summary() {
        s.push_str(&format!(
            "| {size} | {:.6} | {:.6} | {:.2} |\n",
            r.mnn, r.matrix_entropy, r.ratio
        ));
    }
    for metric in BenchMetric::ALL {
        if let Ok(slope) = fit_loglog_slope(table, metric) {
            s.push_str(&format!("\nlog-log slope ({metric}): {slope:.3}"));
        }
    }
    if table.failed_repeats() > 0 {
        s.push_str(&format!(
            "\n{} repeat(s) did not converge and were excluded",
            table.failed_repeats()
        ));
    }
    s.push('\n');
    s
}

fn load_metric_reports(paths: &[PathBuf], metric: &str) -> CliResult<Vec<MetricReport>> {
    paths
        .iter()
        .map(|p| {
            let batch = BatchReport::load(p)?;
            batch.metric(metric).cloned().ok_or_else(|| {
                CliError::Data(Error::Report {
                    path: p.clone(),
                    message: format!("no '{metric}' report"),
                })
            })
        })
        .collect()
}

#[derive(Serialize)]
struct CohortOutput<'a> {
    cohort: &'a str,
    entries: &'a [RankEntry],
}

fn rank(args: RankArgs, out: &mut dyn Write) -> CliResult<()> {
    let reports = load_metric_reports(&args.reports, &args.metric)?;
    let groups = match args.group_by {
        Some(GroupBy::SizeCohort) => aggregate_by_cohort(&reports)?,
        None => vec![(String::new(), aggregate_scores(&reports)?)],
    };
    let text = match (args.format, args.group_by) {
        (OutputFormat::Json, None) => to_json(&groups[0].1),
        (OutputFormat::Json, Some(_)) => {
            let view: Vec<CohortOutput> = groups
                .iter()
                .map(|(c, e)| CohortOutput {
                    cohort: c,
                    entries: e,
                })
                .collect();
            to_json(&view)
        }
        (OutputFormat::Markdown, _) => groups
            .iter()
            .map(|(c, e)| {
                if c.is_empty() {
                    render_markdown(e)
                } else {
                    format!("### {c}\n\n{}", render_markdown(e))
                }
            })
            .collect::<Vec<_>>()
            .join("\n"),
        (OutputFormat::Csv, None) => render_csv(&groups[0].1),
        (OutputFormat::Csv, Some(_)) => groups
            .iter()
            .map(|(c, e)| format!("# {c}\n{}", render_csv(e)))
            .collect::<String>(),
    };
    emit(out, &text)
}

fn stability(args: StabilityArgs, out: &mut dyn Write) -> CliResult<()> {
    let values = if args.reports.is_empty() {
        args.values
    } else {
        load_metric_reports(&args.reports, &args.metric)?
            .iter()
            .map(|r| r.mean)
            .collect()
    };
    if values.len() < 2 {
        return Err(CliError::Usage("stability needs at least 2 values".into()));
    }
    let s = stability_report(&values)?;
    let text = match args.format {
        OutputFormat::Json => to_json(&s),
        OutputFormat::Csv => format!(
            "count,mean,std_sample,std_population\n{},{},{},{}\n",
            s.count, s.mean, s.std_sample, s.std_population
        ),
        OutputFormat::Markdown => {
            let mut rows = BTreeMap::new();
            rows.insert("mean", s.mean);
            rows.insert("std (n-1)", s.std_sample);
            rows.insert("std (n)", s.std_population);
            let mut t = format!("| statistic | value |\n|---|---:|\n| count | {} |\n", s.count);
            for (k, v) in rows {
                t.push_str(&format!("| {k} | {v:.7} |\n"));
            }
            t
        }
    };
    emit(out, &text)
}
