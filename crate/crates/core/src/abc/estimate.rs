use crate::error::{AbcError, Result};
use crate::oracle::ModelPrior;

use super::accept::AcceptedSet;
use super::config::AcceptanceRule;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatorKind {
    Frequency,
    LocalLogistic,
}

/// `ln B̂₁₂`, which is infinite when one model received no acceptances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LogBayesFactor {
    Finite(f64),
    PlusInfinity,
    MinusInfinity,
}

impl LogBayesFactor {
    pub fn as_f64(self) -> f64 {
        match self {
            LogBayesFactor::Finite(v) => v,
            LogBayesFactor::PlusInfinity => f64::INFINITY,
            LogBayesFactor::MinusInfinity => f64::NEG_INFINITY,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            LogBayesFactor::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        !matches!(self, LogBayesFactor::Finite(_))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorEstimate {
    /// `(P̂(M=1|y), P̂(M=2|y))`.
    pub prob: [f64; 2],
    pub log_bf: LogBayesFactor,
    pub estimator: EstimatorKind,
    pub rule: AcceptanceRule,
    /// `(N₁, N₂)` among the accepted rows.
    pub counts: (usize, usize),
    /// Set when the logistic fit hit complete separation and was clamped.
    pub separation: bool,
}

impl PosteriorEstimate {
    pub fn prob1(&self) -> f64 {
        self.prob[0]
    }
}

/// Acceptance frequencies: `P̂(M=m|y) = N_m / N` and
/// `B̂₁₂ = π(M=2) N₁ / (π(M=1) N₂)`.
pub fn estimate_posterior_frequency(acc: &AcceptedSet, prior: ModelPrior) -> Result<PosteriorEstimate> {
    if acc.is_empty() {
        return Err(AbcError::EmptyAcceptedSet);
    }
    let (n1, n2) = acc.counts();
    let total = (n1 + n2) as f64;
    let log_bf = match (n1, n2) {
        (0, _) => LogBayesFactor::MinusInfinity,
        (_, 0) => LogBayesFactor::PlusInfinity,
        _ => LogBayesFactor::Finite((n1 as f64).ln() - (n2 as f64).ln() - prior.log_odds()),
    };
    Ok(PosteriorEstimate {
        prob: [n1 as f64 / total, n2 as f64 / total],
        log_bf,
        estimator: EstimatorKind::Frequency,
        rule: acc.rule,
        counts: (n1, n2),
        separation: false,
    })
}
