use mnn_core::report::stability_report;

fn main() -> mnn_core::error::Result<()> {
    // Five repeated MNN measurements of one model on resampled data.
    let runs = [0.5684, 0.5670, 0.5676, 0.5699, 0.5693];
    let s = stability_report(&runs)?;
    println!("n = {}", s.count);
    println!("mean = {:.5}", s.mean);
    println!("std (n-1) = {:.7}", s.std_sample);
    println!("std (n)   = {:.7}", s.std_population);
    Ok(())
}
