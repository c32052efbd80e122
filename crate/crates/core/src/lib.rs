//! Communication model of citation counts.
//!
//! A paper's citation count is modelled as a two-regime mixture of geometric
//! distributions whose rates are inverse-Gaussian distributed (the
//! reciprocal of a Wald first-passage time). Marginalising the rates gives a
//! closed-form five-parameter PMF over `k >= 1`, implemented in [`model`].
//!
//! Around that model the crate provides
//!
//! * [`numerics`]: special functions, adaptive quadrature and a
//!   Nelder-Mead minimizer with restarts,
//! * [`baselines`]: the usual competitor citation laws (double power law,
//!   lognormal, stretched exponential, modified Bessel, Tsallis),
//! * [`estimation`]: maximum-likelihood and chi-square fitting plus the
//!   Pearson goodness-of-fit test on merged bins,
//! * [`analysis`]: burst-interval partitioning and hazard curves,
//! * [`synthesis`]: exact samplers for synthetic corpora,
//! * [`dataio`]: counts/histogram ingest, CCDF tables and fit reports,
//! * [`cli`]: the `citekinetics` command-line front end.
//!
//! See the `examples/` directory of this crate for one runnable program per
//! capability.

pub mod analysis;
pub mod baselines;
pub mod cli;
pub mod dataio;
mod error;
pub mod estimation;
pub mod histogram;
pub mod model;
pub mod numerics;
pub mod synthesis;

pub use error::{Error, Result};
pub use histogram::Histogram;
pub use model::{ComponentParams, ModelParams};
