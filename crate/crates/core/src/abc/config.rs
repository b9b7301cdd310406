use std::fmt;
use std::str::FromStr;

use crate::error::{AbcError, Result};
use crate::oracle::ModelPrior;
use crate::stats::SummaryStatistic;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Metric {
    Euclidean,
    /// Euclidean after dividing each coordinate by its median absolute
    /// deviation over the reference table.
    #[default]
    NormalizedEuclidean,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AcceptanceRule {
    /// Keep every row with distance `<= eps`.
    FixedTolerance(f64),
    /// Keep the `k` closest rows; ties broken by lowest row index.
    KNearest(usize),
}

impl AcceptanceRule {
    pub fn validate(&self, table_size: usize) -> Result<()> {
        match *self {
            AcceptanceRule::FixedTolerance(eps) if eps.is_nan() || eps < 0.0 => Err(
                AbcError::InvalidParameter(format!("tolerance must be >= 0, got {eps}")),
            ),
            AcceptanceRule::KNearest(0) => Err(AbcError::InvalidParameter("k must be >= 1".into())),
            AcceptanceRule::KNearest(k) if k > table_size => Err(AbcError::KExceedsTable { k, table_size }),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for AcceptanceRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AcceptanceRule::FixedTolerance(eps) => write!(f, "eps:{eps}"),
            AcceptanceRule::KNearest(k) => write!(f, "knn:{k}"),
        }
    }
}

impl FromStr for AcceptanceRule {
    type Err = AbcError;

    /// `knn:<k>` or `eps:<x>` (`eps:inf` accepted).
    fn from_str(s: &str) -> Result<Self> {
        let bad = || AbcError::Parse(format!("rule must be knn:<k> or eps:<x>, got '{s}'"));
        let (kind, value) = s.split_once(':').ok_or_else(bad)?;
        match kind {
            "knn" => value.parse().map(AcceptanceRule::KNearest).map_err(|_| bad()),
            "eps" => {
                let eps: f64 = value.parse().map_err(|_| bad())?;
                if eps.is_nan() || eps < 0.0 {
                    return Err(bad());
                }
                Ok(AcceptanceRule::FixedTolerance(eps))
            }
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AbcConfig {
    pub statistic: SummaryStatistic,
    pub metric: Metric,
    pub rule: AcceptanceRule,
    pub model_prior: ModelPrior,
    pub table_size: usize,
    pub data_size: usize,
    pub master_seed: u64,
}

impl AbcConfig {
    /// Normalized Euclidean distance with the 500 nearest rows, the usual
    /// choice in population-genetics ABC.
    pub fn new(statistic: SummaryStatistic, table_size: usize, data_size: usize, master_seed: u64) -> Self {
        AbcConfig {
            statistic,
            metric: Metric::NormalizedEuclidean,
            rule: AcceptanceRule::KNearest(500.min(table_size.max(1))),
            model_prior: ModelPrior::UNIFORM,
            table_size,
            data_size,
            master_seed,
        }
    }

    pub fn with_rule(mut self, rule: AcceptanceRule) -> Self {
        self.rule = rule;
        self
    }

    pub fn with_metric(mut self, metric: Metric) -> Self {
        self.metric = metric;
        self
    }

    pub fn with_prior(mut self, prior: ModelPrior) -> Self {
        self.model_prior = prior;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.master_seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.table_size == 0 {
            return Err(AbcError::InvalidParameter("table size must be >= 1".into()));
        }
        if self.data_size == 0 {
            return Err(AbcError::InvalidParameter("data size must be >= 1".into()));
        }
        self.rule.validate(self.table_size)
    }
}
