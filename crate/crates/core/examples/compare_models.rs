//! Fit every supported family to one corpus and rank them by AIC.

use citekinetics::estimation::{compare_models, fit_model, GofConfig, ModelKind};
use citekinetics::numerics::OptimizerConfig;
use citekinetics::synthesis::generate_corpus;
use citekinetics::{Error, ModelParams};

fn main() -> citekinetics::Result<()> {
    let truth = ModelParams::from_array([0.7, 2.0, 1.0, 50.0, 0.5])?;
    let h = generate_corpus(&truth, 20_000, 2)?.to_histogram();
    let gof = GofConfig::default();
    let mut reports = Vec::new();
    for kind in ModelKind::ALL {
        let cfg = OptimizerConfig::for_dimension(kind.n_params());
        match fit_model(kind, &h, kind.default_method(), &gof, &cfg) {
            Ok(r) => reports.push(r),
            Err(Error::FitNotConverged(r)) => reports.push(*r),
            Err(e) => eprintln!("{kind}: {e}"),
        }
    }
    let ranking = compare_models(&reports)?;
    println!("{:<10} {:<6} {:>12} {:>10} {:>8}", "model", "method", "AIC", "dAIC", "p");
    for r in &ranking.rows {
        let p = r.p_value.map_or("-".into(), |p| format!("{p:.3}"));
        println!("{:<10} {:<6} {:>12.1} {:>10.1} {:>8}", r.model_kind.to_string(), r.method.to_string(), r.aic, r.delta_aic, p);
    }
    Ok(())
}
