use std::path::PathBuf;

use thiserror::Error;

/// Errors produced across the simulation, oracle, ABC and reporting layers.
#[derive(Debug, Error)]
pub enum AbcError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("model index must be 1 or 2, got {0}")]
    InvalidModelIndex(u8),

    #[error("statistic {statistic} is not defined for {data} data")]
    IncompatibleStatistic {
        statistic: &'static str,
        data: &'static str,
    },

    #[error("dataset does not match model pair: {0}")]
    IncompatibleData(String),

    #[error("no closed-form oracle for statistic {0}")]
    UnsupportedStatistic(&'static str),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("k = {k} exceeds table size {table_size}")]
    KExceedsTable { k: usize, table_size: usize },

    #[error("accepted set is empty")]
    EmptyAcceptedSet,

    #[error("need at least {needed} accepted rows for the logistic fit, got {got}")]
    TooFewAccepted { needed: usize, got: usize },

    #[error("logistic fit did not converge after {iterations} iterations (gradient norm {gradient_norm:e})")]
    NonConvergence {
        iterations: usize,
        gradient_norm: f64,
        last_iterate: Vec<f64>,
    },

    #[error("{0}")]
    Domain(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("invariant violated: {0}")]
    Guard(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, AbcError>;

impl AbcError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        AbcError::Io {
            path: path.into(),
            source,
        }
    }
}
