//! Write a histogram file, read it back and export an empirical CCDF with
//! the model overlay as a plot table.

use citekinetics::dataio::{empirical_ccdf, read_histogram, write_histogram, write_plot_table};
use citekinetics::synthesis::generate_corpus;
use citekinetics::ModelParams;

fn main() -> citekinetics::Result<()> {
    let m = ModelParams::from_array([0.7, 2.0, 1.0, 50.0, 0.5])?;
    let h = generate_corpus(&m, 50_000, 3)?.to_histogram().with_uncited(4_000);
    let dir = std::env::temp_dir();
    let hist = dir.join("citekinetics_example_hist.csv");
    write_histogram(&h, &hist)?;
    let back = read_histogram(&hist)?;
    assert_eq!(back, h);

    let table = empirical_ccdf(&back)?.with_model(&m);
    let out = dir.join("citekinetics_example_ccdf.tsv");
    write_plot_table(&table.to_plot_table(), &out)?;
    println!("{} rows written to {}", table.rows.len(), out.display());
    for r in table.rows.iter().take(6) {
        println!("k = {:>3}: empirical {:.4}, model {:.4}", r.k, r.empirical, r.model.unwrap());
    }
    Ok(())
}
