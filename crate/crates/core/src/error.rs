use std::path::PathBuf;

use thiserror::Error;

use crate::oracle::Stage2Rates;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A structural parameter or schedule violates its invariant.
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParam { field: &'static str, reason: String },

    /// An operation was called outside its domain of validity.
    #[error("domain error: {0}")]
    Domain(String),

    /// A marginal effect was requested exactly at a regime-switching rate.
    #[error("t_M = {t_m} is the switching rate {threshold}; use the jump terms instead")]
    AtSwitchingRate { t_m: f64, threshold: &'static str },

    /// Closed-form thresholds came out in the wrong order.
    #[error("threshold ordering violated: {0}")]
    ThresholdOrdering(String),

    /// Best-response iteration ran out of budget.
    #[error("best responses did not converge in {iterations} iterations (last profile {last:?})")]
    NoConvergence { iterations: usize, last: Stage2Rates },

    #[error("numerical failure: {0}")]
    Numeric(String),

    /// No admissible parameters reproduce the targets.
    #[error("calibration infeasible: {0}")]
    Infeasible(String),

    /// A config/moments file failed validation.
    #[error("schema error in field `{field}`: {reason}")]
    Schema { field: String, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn param(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParam {
            field,
            reason: reason.into(),
        }
    }

    pub(crate) fn schema(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Schema {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
