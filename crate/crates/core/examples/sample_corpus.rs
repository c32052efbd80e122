//! Draw a reproducible synthetic corpus and summarise it.

use citekinetics::dataio::DatasetSummary;
use citekinetics::synthesis::generate_corpus;
use citekinetics::ModelParams;

fn main() -> citekinetics::Result<()> {
    let m = ModelParams::from_array([0.7, 2.0, 1.0, 50.0, 0.5])?;
    let corpus = generate_corpus(&m, 100_000, 42)?;
    let h = corpus.to_histogram();
    println!("{}", DatasetSummary::of("synthetic", &h));
    let ones = h.count(1) as f64 / h.n_cited() as f64;
    println!("share with one citation: {ones:.4} (model {:.4})", m.pmf(1));
    println!("first ten counts: {:?}", &corpus.counts[..10]);
    Ok(())
}
