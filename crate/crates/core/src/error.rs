use std::path::PathBuf;

use thiserror::Error;

use crate::estimation::FitReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative numerical procedure ran out of budget. `estimate` is the
    /// best value reached.
    #[error("{what} did not converge (best estimate {estimate:e}, error estimate {error_estimate:e})")]
    Convergence {
        what: &'static str,
        estimate: f64,
        error_estimate: f64,
    },

    /// Every optimizer restart failed to meet the tolerance. The best report
    /// found is still attached.
    #[error("fit of {} did not converge", .0.model_kind)]
    FitNotConverged(Box<FitReport>),

    /// Survival probability too small to evaluate reliably.
    #[error("survival underflow at tau = {tau:e}; largest safe tau is {largest_safe:e}")]
    SurvivalUnderflow { tau: f64, largest_safe: f64 },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
