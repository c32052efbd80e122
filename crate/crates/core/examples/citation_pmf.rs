//! Evaluate the citation PMF and CCDF, and check one value against the
//! compounding integral it comes from.

use citekinetics::model::{citation_ccdf, citation_pmf, geometric_pmf, rate_density, Rate};
use citekinetics::numerics::{integrate_with_breaks, Interval};
use citekinetics::ModelParams;

fn main() -> citekinetics::Result<()> {
    let m = ModelParams::from_array([0.7, 2.0, 1.0, 50.0, 0.5])?;
    println!("{:>6} {:>14} {:>14}", "k", "P(k)", "Pr[K > k]");
    for k in [1, 2, 5, 10, 50, 100, 1000] {
        println!("{k:>6} {:>14.6e} {:>14.6e}", citation_pmf(&m, k), citation_ccdf(&m, k));
    }

    // Single regime: P(k) = ∫ geometric(β, k) ρ(β) dβ.
    let p = m.comp1();
    let k = 10;
    let q = integrate_with_breaks(
        |b| {
            if b > 0.0 {
                geometric_pmf(Rate::new(b).unwrap(), k) * rate_density(p, Rate::new(b).unwrap())
            } else {
                0.0
            }
        },
        Interval::to_infinity(0.0)?,
        &[0.1, 1.0 / p.mu()],
        1e-10,
    )?;
    println!("\nfirst regime, k = {k}: closed form {:.12e}, quadrature {q:.12e}", p.pmf(k));
    Ok(())
}
