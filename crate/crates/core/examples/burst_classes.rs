//! Burst interval of a model and the resulting paper classes.

use citekinetics::analysis::{burst_interval, classify, mean_rate_ratio};
use citekinetics::ModelParams;

fn main() -> citekinetics::Result<()> {
    let m = ModelParams::from_array([0.7, 2.0, 1.0, 50.0, 0.5])?;
    let p = burst_interval(&m);
    println!("burst interval {p}, E(b2)/E(b1) = {:.3}", mean_rate_ratio(&m));
    for k in [1, 3, 10, 100, 1000, 10_000] {
        println!("{k:>6} citations: {}", classify(k, &p)?);
    }
    Ok(())
}
