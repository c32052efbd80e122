//! Special functions, quadrature and the simplex minimizer.

use citekinetics::numerics::{integrate, ln_gamma, log_add_exp, minimize, regularized_gamma_q, Interval, OptimizerConfig};

fn main() -> citekinetics::Result<()> {
    println!("ln Gamma(10.5) = {:.15}", ln_gamma(10.5)?);
    println!("Q(2.5, 3) = {:.15}", regularized_gamma_q(2.5, 3.0)?);
    println!("ln(e^-800 + e^-801) = {:.12}", log_add_exp(-800.0, -801.0));

    // ∫_1^∞ x^{-3/2} dx = 2
    let v = integrate(|x| x.powf(-1.5), Interval::to_infinity(1.0)?, 1e-10)?;
    println!("integral of x^-1.5 on [1, inf) = {v:.12}");

    let rosen = |x: &[f64]| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2);
    let m = minimize(rosen, &[-1.2, 1.0], &OptimizerConfig::for_dimension(2))?;
    println!("Rosenbrock minimum near {:?} after {} evaluations", m.argmin, m.evaluations);
    Ok(())
}
