//! Numerical building blocks shared by every other module: special
//! functions, log-space arithmetic, adaptive quadrature and a simplex
//! minimizer. Everything here is a pure function of its inputs.

mod logspace;
mod optimize;
mod quadrature;
mod special;

pub use logspace::{log1m_exp, log_add_exp, log_diff_exp};
pub use optimize::{minimize, Minimum, OptimizerConfig};
pub use quadrature::{integrate, integrate_with_breaks, Interval};
pub use special::{
    bessel_i0, erfc, ln_bessel_i0, ln_gamma, ln_regularized_gamma_q, ln_std_normal_sf,
    regularized_gamma_p, regularized_gamma_q, std_normal_cdf, std_normal_sf,
};
