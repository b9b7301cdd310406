//! Reproducible experiment runners and their CSV/SVG output.

mod report;
mod runners;
mod svg;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::abc::AcceptanceRule;
use crate::error::{AbcError, Result};
use crate::sim::ModelPairSpec;
use crate::stats::SummaryStatistic;

pub use report::{emit_outputs, Aggregate, Cell, ExperimentReport, PlotKind, PlotSpec, GUARD_TOLERANCE};
pub use runners::{run_abc_vs_exact, run_false_alloc, run_fig1, run_lemma_convergence, run_normal_discrepancy};
pub use svg::render_svg;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExperimentId {
    Fig1,
    LemmaConvergence,
    NormalDiscrepancy,
    AbcVsExact,
    FalseAlloc,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 5] = [
        ExperimentId::Fig1,
        ExperimentId::LemmaConvergence,
        ExperimentId::NormalDiscrepancy,
        ExperimentId::AbcVsExact,
        ExperimentId::FalseAlloc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentId::Fig1 => "fig1",
            ExperimentId::LemmaConvergence => "lemma-convergence",
            ExperimentId::NormalDiscrepancy => "normal-discrepancy",
            ExperimentId::AbcVsExact => "abc-vs-exact",
            ExperimentId::FalseAlloc => "false-alloc",
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentId {
    type Err = AbcError;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| AbcError::Parse(format!("unknown experiment {s:?}")))
    }
}

/// Everything a runner needs. [`ExperimentSpec::defaults`] fills in the
/// desk-scale constants for each experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub experiment: ExperimentId,
    pub pair: ModelPairSpec,
    /// Datasets per generating model (fig1, normal-discrepancy,
    /// false-alloc), seeds (lemma-convergence) or total datasets
    /// (abc-vs-exact).
    pub replicates: usize,
    /// Sample size; for lemma-convergence the largest point of the grid.
    pub n: usize,
    pub master_seed: u64,
    pub out_dir: PathBuf,
    pub plot: bool,
    pub statistic: SummaryStatistic,
    pub rule: AcceptanceRule,
    pub table_size: usize,
    /// Poisson mean of the lemma-convergence data on the count pair.
    pub theta0: f64,
}

impl ExperimentSpec {
    pub fn defaults(experiment: ExperimentId, master_seed: u64, out_dir: impl Into<PathBuf>) -> Self {
        let normal = ModelPairSpec::NormalNormal {
            sigma1: 0.1,
            sigma2: 10.0,
            prior_scale: 1.0,
        };
        let (pair, replicates, n, table_size, rule) = match experiment {
            ExperimentId::Fig1 => (ModelPairSpec::PoissonGeometric, 10_000, 50, 0, AcceptanceRule::KNearest(1)),
            ExperimentId::LemmaConvergence => {
                (ModelPairSpec::PoissonGeometric, 10, 100_000, 0, AcceptanceRule::KNearest(1))
            }
            ExperimentId::NormalDiscrepancy => (normal, 10_000, 15, 0, AcceptanceRule::KNearest(1)),
            ExperimentId::AbcVsExact => (
                ModelPairSpec::PoissonGeometric,
                100,
                5,
                100_000,
                AcceptanceRule::KNearest(500),
            ),
            ExperimentId::FalseAlloc => (
                ModelPairSpec::PoissonGeometric,
                500,
                100,
                1_000,
                AcceptanceRule::KNearest(50),
            ),
        };
        ExperimentSpec {
            experiment,
            statistic: if pair.is_count() { SummaryStatistic::Sum } else { SummaryStatistic::Mean },
            pair,
            replicates,
            n,
            master_seed,
            out_dir: out_dir.into(),
            plot: false,
            rule,
            table_size,
            theta0: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(AbcError::InvalidParameter("replicate count must be >= 1".into()));
        }
        if self.n == 0 {
            return Err(AbcError::InvalidParameter("n must be >= 1".into()));
        }
        let needs_count = matches!(self.experiment, ExperimentId::Fig1 | ExperimentId::AbcVsExact);
        if needs_count && !self.pair.is_count() {
            return Err(AbcError::InvalidParameter(format!(
                "{} runs on the count pair only",
                self.experiment
            )));
        }
        if self.experiment == ExperimentId::NormalDiscrepancy && self.pair.is_count() {
            return Err(AbcError::InvalidParameter("normal-discrepancy runs on the normal pair only".into()));
        }
        if self.experiment == ExperimentId::LemmaConvergence && !(self.theta0 > 0.0 && self.theta0.is_finite()) {
            return Err(AbcError::InvalidParameter(format!("theta0 must be > 0, got {}", self.theta0)));
        }
        Ok(())
    }

    /// Sample sizes visited by lemma-convergence: powers of ten from 100 up
    /// to `n`, and `n` itself.
    pub fn n_grid(&self) -> Vec<usize> {
        let mut grid: Vec<usize> = std::iter::successors(Some(100usize), |v| v.checked_mul(10))
            .take_while(|v| *v < self.n)
            .collect();
        grid.push(self.n);
        grid
    }
}

/// Dispatches on `spec.experiment`.
pub fn run(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    spec.validate()?;
    match spec.experiment {
        ExperimentId::Fig1 => run_fig1(spec),
        ExperimentId::LemmaConvergence => run_lemma_convergence(spec),
        ExperimentId::NormalDiscrepancy => run_normal_discrepancy(spec),
        ExperimentId::AbcVsExact => run_abc_vs_exact(spec),
        ExperimentId::FalseAlloc => run_false_alloc(spec),
    }
}
