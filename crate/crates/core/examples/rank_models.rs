//! Ranks models by average score across datasets, per size cohort.

use mnn_core::report::{aggregate_by_cohort, render_markdown, MetricReport};

const SCORES: &[(&str, f64, f64)] = &[
    ("DeepSeek-7B", 0.3352, 0.4357),
    ("Gemma-7B", 0.3759, 0.3998),
    ("Vicuna-7B", 0.4623, 0.4824),
    ("LLaMA 2-7B", 0.4648, 0.5038),
    ("QWEN 1.5-7B", 0.4866, 0.5165),
    ("Mistral-7B", 0.4980, 0.5126),
    ("QWEN 2-7B", 0.5989, 0.5751),
    ("QWEN 1.5-72B", 0.5291, 0.5065),
    ("QWEN 2-72B", 0.5261, 0.4689),
    ("Llama 3-70B", 0.4935, 0.4967),
    ("Llama 2-70B", 0.3862, 0.4086),
];

fn main() -> mnn_core::error::Result<()> {
    let reports: Vec<MetricReport> = SCORES
        .iter()
        .flat_map(|&(model, alpaca, arena)| {
            [
                MetricReport::from_score(model, "AlpacaEval", "mnn", alpaca),
                MetricReport::from_score(model, "Chatbot Arena", "mnn", arena),
            ]
        })
        .collect();
    for (cohort, entries) in aggregate_by_cohort(&reports)? {
        println!("### {cohort}\n\n{}", render_markdown(&entries));
    }
    Ok(())
}
