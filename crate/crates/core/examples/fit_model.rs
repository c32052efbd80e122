//! Fit the citation model by maximum likelihood and test the fit.

use citekinetics::estimation::{fit_mle, GofConfig};
use citekinetics::numerics::OptimizerConfig;
use citekinetics::synthesis::generate_corpus;
use citekinetics::{Error, ModelParams};

fn main() -> citekinetics::Result<()> {
    let truth = ModelParams::from_array([0.7, 2.0, 1.0, 50.0, 0.5])?;
    let h = generate_corpus(&truth, 20_000, 1)?.to_histogram();
    let report = match fit_mle(&h, None, &GofConfig::default(), &OptimizerConfig::for_dimension(5)) {
        Ok(r) => r,
        Err(Error::FitNotConverged(r)) => {
            eprintln!("warning: optimizer did not converge");
            *r
        }
        Err(e) => return Err(e),
    };
    for (name, v) in report.params.names().iter().zip(report.params.values()) {
        println!("{name:>8} = {v:.4}");
    }
    println!("log-likelihood {:.2}, AIC {:.2}", report.log_likelihood, report.aic);
    if let Some(g) = report.gof {
        println!(
            "chi2 = {:.2} on {} dof, p = {:.3} ({})",
            g.chi2_stat,
            g.dof,
            g.p_value,
            if g.reject { "rejected" } else { "not rejected" }
        );
    }
    if let Some(b) = report.burst {
        println!("burst interval {b}");
    }
    Ok(())
}
