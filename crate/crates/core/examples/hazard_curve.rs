//! Hazard of the processing time, in natural and normalized units.

use citekinetics::analysis::hazard_curve;
use citekinetics::model::largest_safe_tau;
use citekinetics::ComponentParams;

fn main() -> citekinetics::Result<()> {
    let p = ComponentParams::new(2.0, 1.0)?;
    let grid: Vec<f64> = (1..=20).map(|i| 2.0 * f64::from(i)).collect();
    let curve = hazard_curve(&p, &grid)?;
    println!("{:>8} {:>12} {:>10} {:>10}", "tau", "h", "tau/E", "h*E");
    for (&(t, h), (tn, hn)) in curve.points.iter().zip(curve.normalized()) {
        println!("{t:>8.1} {h:>12.6} {tn:>10.2} {hn:>10.4}");
    }
    println!("asymptote lambda/(2 mu^2) = {}", p.lambda() / (2.0 * p.mu() * p.mu()));
    println!("survival resolvable up to tau = {:.0}", largest_safe_tau(&p));
    Ok(())
}
