//! The competitor laws on their natural domains.

use citekinetics::baselines::{
    Baseline, BaselineParams, BesselParams, DoublePowerLawParams, LognormalParams, StretchedExpParams, TsallisParams,
};
use citekinetics::model::CountDistribution;

fn main() -> citekinetics::Result<()> {
    let laws = [
        BaselineParams::DoublePowerLaw(DoublePowerLawParams::new(1.5, 3.0, 0.4)?),
        BaselineParams::Lognormal(LognormalParams::new(0.5, 0.3)?),
        BaselineParams::StretchedExp(StretchedExpParams::new(8.0, 0.4)?),
        BaselineParams::Bessel(BesselParams::new(0.01, 150)?),
        BaselineParams::Tsallis(TsallisParams::new(1.6, 0.2)?),
    ];
    for p in laws {
        let b = Baseline::with_natural_domain(p)?;
        println!(
            "{:<10} P(1) = {:.4}  P(10) = {:.3e}  Pr[K > 100] = {:.3e}",
            p.kind().to_string(),
            b.pmf(1),
            b.pmf(10),
            b.ccdf(100)
        );
    }
    if let BaselineParams::DoublePowerLaw(d) = laws[0] {
        println!("double power law crossover at k = {:?}", d.k_break());
    }
    Ok(())
}
