use mnn_core::prob::{cross_entropy, perplexity, LogProbSequence};

fn main() -> mnn_core::error::Result<()> {
    let lp = LogProbSequence::new(vec![0.5f64.ln(), 0.25f64.ln(), 0.9f64.ln()])?;
    println!("cross-entropy = {:.6} nats", cross_entropy(&lp));
    println!("perplexity    = {:.6}", perplexity(&lp));
    Ok(())
}
