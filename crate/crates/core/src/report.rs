//! Per-model metric reports, cross-dataset ranking, and sampling-stability statistics.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleValue {
    pub id: String,
    pub value: f64,
}

/// One metric over one (model, dataset) pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    #[serde(rename = "model")]
    pub model_label: String,
    #[serde(rename = "dataset")]
    pub dataset_label: String,
    pub metric: String,
    pub per_sample: Vec<SampleValue>,
    pub mean: f64,
    pub count: usize,
}

impl MetricReport {
    pub fn new(
        model_label: impl Into<String>,
        dataset_label: impl Into<String>,
        metric: impl Into<String>,
        per_sample: Vec<SampleValue>,
    ) -> Result<Self> {
        if per_sample.is_empty() {
            return Err(Error::InvalidInput("report has no samples".into()));
        }
        let count = per_sample.len();
        let mean = per_sample.iter().map(|s| s.value).sum::<f64>() / count as f64;
        Ok(MetricReport {
            model_label: model_label.into(),
            dataset_label: dataset_label.into(),
            metric: metric.into(),
            per_sample,
            mean,
            count,
        })
    }

    /// A report holding only a dataset-level score (e.g. a published table cell).
    pub fn from_score(
        model_label: impl Into<String>,
        dataset_label: impl Into<String>,
        metric: impl Into<String>,
        score: f64,
    ) -> Self {
        let dataset_label = dataset_label.into();
        MetricReport::new(
            model_label,
            dataset_label.clone(),
            metric,
            vec![SampleValue {
                id: dataset_label,
                value: score,
            }],
        )
        .expect("one sample is never empty")
    }

    fn validate(&self) -> std::result::Result<(), String> {
        if self.count != self.per_sample.len() {
            return Err(format!(
                "count {} does not match {} samples",
                self.count,
                self.per_sample.len()
            ));
        }
        if self.count == 0 {
            return Err("report has no samples".into());
        }
        let mean = self.per_sample.iter().map(|s| s.value).sum::<f64>() / self.count as f64;
        if (mean - self.mean).abs() > 1e-12 * mean.abs().max(1.0) {
            return Err(format!("mean {} does not match samples ({mean})", self.mean));
        }
        Ok(())
    }
}

/// Everything `batch` computes for one manifest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchReport {
    pub model: String,
    pub dataset: String,
    pub reports: Vec<MetricReport>,
}

impl BatchReport {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let invalid = |message: String| Error::Report {
            path: path.to_path_buf(),
            message,
        };
        let batch: BatchReport = serde_json::from_str(&text).map_err(|e| invalid(e.to_string()))?;
        for r in &batch.reports {
            r.validate()
                .map_err(|m| invalid(format!("metric '{}': {m}", r.metric)))?;
        }
        Ok(batch)
    }

    pub fn metric(&self, name: &str) -> Option<&MetricReport> {
        self.reports.iter().find(|r| r.metric == name)
    }
}

/// Which way a metric improves.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    LowerIsBetter,
    HigherIsBetter,
}

impl Direction {
    /// Compression-style metrics and language-model losses improve downwards; anything
    /// accuracy-like improves upwards.
    pub fn for_metric(name: &str) -> Direction {
        let name = name.to_ascii_lowercase();
        if ["accuracy", "acc", "win-rate", "win_rate", "f1"]
            .iter()
            .any(|m| name == *m)
        {
            Direction::HigherIsBetter
        } else {
            Direction::LowerIsBetter
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankEntry {
    #[serde(rename = "model")]
    pub model_label: String,
    pub dataset_scores: BTreeMap<String, f64>,
    pub avg: f64,
    pub rank: usize,
}

/// Averages each model's dataset means and ranks the models, best first.
///
/// The ordering direction follows [`Direction::for_metric`].
pub fn aggregate_scores(reports: &[MetricReport]) -> Result<Vec<RankEntry>> {
    let direction = reports
        .first()
        .map_or(Direction::LowerIsBetter, |r| Direction::for_metric(&r.metric));
    aggregate_scores_with(reports, direction)
}

pub fn aggregate_scores_with(reports: &[MetricReport], direction: Direction) -> Result<Vec<RankEntry>> {
    let metrics: BTreeSet<&str> = reports.iter().map(|r| r.metric.as_str()).collect();
    if metrics.len() > 1 {
        return Err(Error::InvalidInput(format!(
            "cannot rank across different metrics: {metrics:?}"
        )));
    }
    let mut table: BTreeMap<&str, BTreeMap<String, f64>> = BTreeMap::new();
    let mut datasets = BTreeSet::new();
    for r in reports {
        datasets.insert(r.dataset_label.as_str());
        let row = table.entry(&r.model_label).or_default();
        if row.insert(r.dataset_label.clone(), r.mean).is_some() {
            return Err(Error::InvalidInput(format!(
                "duplicate score for model '{}' on dataset '{}'",
                r.model_label, r.dataset_label
            )));
        }
    }
    for (model, row) in &table {
        if let Some(missing) = datasets.iter().find(|d| !row.contains_key(**d)) {
            return Err(Error::InvalidInput(format!(
                "model '{model}' has no score for dataset '{missing}'"
            )));
        }
    }

    let mut entries: Vec<RankEntry> = table
        .into_iter()
        .map(|(model, dataset_scores)| {
            let avg = dataset_scores.values().sum::<f64>() / dataset_scores.len() as f64;
            RankEntry {
                model_label: model.to_string(),
                dataset_scores,
                avg,
                rank: 0,
            }
        })
        .collect();
    entries.sort_by(|a, b| {
        let by_score = match direction {
            Direction::LowerIsBetter => a.avg.total_cmp(&b.avg),
            Direction::HigherIsBetter => b.avg.total_cmp(&a.avg),
        };
        by_score.then_with(|| a.model_label.cmp(&b.model_label))
    });
    for (i, e) in entries.iter_mut().enumerate() {
        e.rank = i + 1;
    }
    Ok(entries)
}

/// Parameter-count cohort of a model label such as `QWEN 2-72B` or `Cerebras-GPT-111M`,
/// bucketed by decade.
pub fn size_cohort(label: &str) -> String {
    let Some(billions) = parameter_count_billions(label) else {
        return "unknown".to_string();
    };
    match billions {
        b if b < 1.0 => "<1B",
        b if b < 10.0 => "1B-10B",
        b if b < 100.0 => "10B-100B",
        _ => ">=100B",
    }
    .to_string()
}

/// The last `<number>B` or `<number>M` token in the label, in billions.
fn parameter_count_billions(label: &str) -> Option<f64> {
    let bytes = label.as_bytes();
    let mut found = None;
    for (i, &c) in bytes.iter().enumerate() {
        let scale = match c {
            b'B' | b'b' => 1.0,
            b'M' | b'm' => 1e-3,
            _ => continue,
        };
        if bytes.get(i + 1).is_some_and(|n| n.is_ascii_alphanumeric()) {
            continue;
        }
        let start = bytes[..i]
            .iter()
            .rposition(|b| !(b.is_ascii_digit() || *b == b'.'))
            .map_or(0, |p| p + 1);
        if start == i {
            continue;
        }
        if let Ok(v) = label[start..i].parse::<f64>() {
            found = Some(v * scale);
        }
    }
    found
}

/// Ranks each size cohort separately. Cohorts come back in ascending size order.
pub fn aggregate_by_cohort(reports: &[MetricReport]) -> Result<Vec<(String, Vec<RankEntry>)>> {
    let mut groups: BTreeMap<(u8, String), Vec<MetricReport>> = BTreeMap::new();
    for r in reports {
        let cohort = size_cohort(&r.model_label);
        let order = match cohort.as_str() {
            "<1B" => 0,
            "1B-10B" => 1,
            "10B-100B" => 2,
            ">=100B" => 3,
            _ => 4,
        };
        groups.entry((order, cohort)).or_default().push(r.clone());
    }
    groups
        .into_iter()
        .map(|((_, cohort), rs)| Ok((cohort, aggregate_scores(&rs)?)))
        .collect()
}

/// Formats `x` with `places` decimals, rounding halves away from zero.
///
/// The value is first rendered with eight guard digits so that binary representations
/// of decimal ties (0.38545 → 0.3854499…) still round up.
pub fn round_half_up(x: f64, places: usize) -> String {
    let text = format!("{:.*}", places + 8, x.abs());
    let (int_part, frac_part) = text.split_once('.').unwrap_or((&text, ""));
    let mut digits: Vec<u8> = int_part.bytes().chain(frac_part.bytes().take(places)).collect();
    let round_up = frac_part.as_bytes().get(places).is_some_and(|&d| d >= b'5');
    if round_up {
        let mut i = digits.len();
        loop {
            if i == 0 {
                digits.insert(0, b'1');
                break;
            }
            i -= 1;
            if digits[i] == b'9' {
                digits[i] = b'0';
            } else {
                digits[i] += 1;
                break;
            }
        }
    }
    let split = digits.len() - places;
    let mut out = String::new();
    let is_zero = digits.iter().all(|&d| d == b'0');
    if x.is_sign_negative() && !is_zero {
        out.push('-');
    }
    out.push_str(std::str::from_utf8(&digits[..split]).unwrap());
    if places > 0 {
        out.push('.');
        out.push_str(std::str::from_utf8(&digits[split..]).unwrap());
    }
    out
}

fn dataset_columns(entries: &[RankEntry]) -> Vec<String> {
    entries
        .first()
        .map(|e| e.dataset_scores.keys().cloned().collect())
        .unwrap_or_default()
}

/// Markdown table with 4-decimal scores.
pub fn render_markdown(entries: &[RankEntry]) -> String {
    let datasets = dataset_columns(entries);
    let mut out = String::from("| Model |");
    for d in &datasets {
        out.push_str(&format!(" {d} |"));
    }
    out.push_str(" Avg Score | Rank |\n|---|");
    out.push_str(&"---:|".repeat(datasets.len() + 2));
    out.push('\n');
    for e in entries {
        out.push_str(&format!("| {} |", e.model_label));
        for d in &datasets {
            out.push_str(&format!(" {} |", round_half_up(e.dataset_scores[d], 4)));
        }
        out.push_str(&format!(" {} | {} |\n", round_half_up(e.avg, 4), e.rank));
    }
    out
}

/// CSV table with 4-decimal scores.
pub fn render_csv(entries: &[RankEntry]) -> String {
    let datasets = dataset_columns(entries);
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["model".to_string()];
    header.extend(datasets.iter().cloned());
    header.extend(["avg".to_string(), "rank".to_string()]);
    w.write_record(&header).expect("in-memory write");
    for e in entries {
        let mut row = vec![e.model_label.clone()];
        row.extend(datasets.iter().map(|d| round_half_up(e.dataset_scores[d], 4)));
        row.push(round_half_up(e.avg, 4));
        row.push(e.rank.to_string());
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).unwrap()
}

/// Spread of repeated measurements of the same quantity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Stability {
    pub count: usize,
    pub mean: f64,
    /// Divides by `n - 1`.
    pub std_sample: f64,
    /// Divides by `n`.
    pub std_population: f64,
}

pub fn stability_report(values: &[f64]) -> Result<Stability> {
    if values.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "stability needs at least 2 values, got {}",
            values.len()
        )));
    }
    // Welford's running update.
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for (i, &v) in values.iter().enumerate() {
        let delta = v - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (v - mean);
    }
    let n = values.len() as f64;
    Ok(Stability {
        count: values.len(),
        mean,
        std_sample: (m2 / (n - 1.0)).sqrt(),
        std_population: (m2 / n).sqrt(),
    })
}
