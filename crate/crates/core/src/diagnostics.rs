//! Monte Carlo assessment of model-choice procedures.
//!
//! * [`false_allocation_rates`]: how often a decision rule picks the wrong
//!   generating model on prior-predictive pseudo-observed datasets.
//! * [`agreement_report`]: how often two posterior-probability sequences
//!   lead to opposite decisions, plus correlation and mean absolute error.
//! * [`stability_summary`]: spread of an estimator across independent
//!   Monte Carlo repeats.

use std::io::Write;

use rayon::prelude::*;

use crate::abc::{
    accept, compute_distances, estimate_posterior_frequency, estimate_posterior_logistic, generate_reference_table,
    AbcConfig, ReferenceTable,
};
use crate::error::{AbcError, Result};
use crate::oracle::{log_bayes_factor_eta, log_bayes_factor_full, posterior_prob_from_log_bf, ModelPrior};
use crate::rng::{derive_stream, mix_seed};
use crate::sim::{sample_prior, simulate_dataset, Dataset, ModelIndex, ModelPairSpec};
use crate::stats::summarize;

/// Where the posterior probability of model 1 comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum ProbabilitySource {
    /// Exact posterior from `B₁₂` under a uniform model prior.
    ExactFull,
    /// Exact posterior from `B^η₁₂` under a uniform model prior.
    ExactEta,
    AbcFrequency(AbcConfig),
    AbcLogistic(AbcConfig),
}

impl ProbabilitySource {
    pub fn name(&self) -> &'static str {
        match self {
            ProbabilitySource::ExactFull => "exact-full",
            ProbabilitySource::ExactEta => "exact-eta",
            ProbabilitySource::AbcFrequency(_) => "abc-frequency",
            ProbabilitySource::AbcLogistic(_) => "abc-logistic",
        }
    }

    /// Binds the source to a seed and sample size; for ABC sources this
    /// simulates the reference table.
    pub fn prepare(&self, pair: &ModelPairSpec, n: usize, seed: u64) -> Result<PreparedSource> {
        Ok(match self {
            ProbabilitySource::ExactFull => PreparedSource::ExactFull(*pair),
            ProbabilitySource::ExactEta => PreparedSource::ExactEta(*pair),
            ProbabilitySource::AbcFrequency(c) | ProbabilitySource::AbcLogistic(c) => {
                let mut config = c.clone().with_seed(seed);
                config.data_size = n;
                let table = generate_reference_table(pair, &config)?;
                PreparedSource::Abc {
                    logistic: matches!(self, ProbabilitySource::AbcLogistic(_)),
                    config,
                    table,
                }
            }
        })
    }
}

pub enum PreparedSource {
    ExactFull(ModelPairSpec),
    ExactEta(ModelPairSpec),
    Abc {
        logistic: bool,
        config: AbcConfig,
        table: ReferenceTable,
    },
}

impl PreparedSource {
    pub fn prob1(&self, data: &Dataset) -> Result<f64> {
        match self {
            PreparedSource::ExactFull(pair) => Ok(posterior_prob_from_log_bf(
                log_bayes_factor_full(pair, data)?,
                ModelPrior::UNIFORM,
            )),
            PreparedSource::ExactEta(pair) => Ok(posterior_prob_from_log_bf(
                log_bayes_factor_eta(pair, data)?,
                ModelPrior::UNIFORM,
            )),
            PreparedSource::Abc {
                logistic,
                config,
                table,
            } => {
                if data.len() != config.data_size {
                    return Err(AbcError::DimensionMismatch {
                        expected: config.data_size,
                        got: data.len(),
                    });
                }
                let eta_obs = summarize(config.statistic, data)?;
                let distances = compute_distances(table, &eta_obs, config.metric)?;
                let acc = accept(table, &distances, config.rule)?;
                let est = if *logistic {
                    estimate_posterior_logistic(&acc, table, &eta_obs, None, config.model_prior)?
                } else {
                    estimate_posterior_frequency(&acc, config.model_prior)?
                };
                Ok(est.prob1())
            }
        }
    }
}

/// Decides model 1 when `P(M=1|y) >= threshold`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionRule {
    pub source: ProbabilitySource,
    threshold: f64,
}

impl DecisionRule {
    pub fn new(source: ProbabilitySource, threshold: f64) -> Result<Self> {
        if !(threshold > 0.0 && threshold < 1.0) {
            return Err(AbcError::InvalidParameter(format!(
                "threshold must lie in (0, 1), got {threshold}"
            )));
        }
        Ok(DecisionRule { source, threshold })
    }

    pub fn at_half(source: ProbabilitySource) -> Self {
        DecisionRule { source, threshold: 0.5 }
    }

    /// Threshold 0: every dataset is allocated to model 1.
    pub fn always_model_one() -> Self {
        DecisionRule {
            source: ProbabilitySource::ExactFull,
            threshold: 0.0,
        }
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn decide(&self, prob1: f64) -> ModelIndex {
        if prob1 >= self.threshold {
            ModelIndex::One
        } else {
            ModelIndex::Two
        }
    }

    pub fn label(&self) -> String {
        if self.threshold == 0.0 {
            "always-model-1".to_string()
        } else {
            self.source.name().to_string()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AllocationRecord {
    pub replicate: usize,
    pub true_model: ModelIndex,
    pub decided: ModelIndex,
    pub prob1: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfusionSummary {
    pub replicates_per_model: usize,
    /// Misallocation rate under true model 1 and true model 2.
    pub rates: [f64; 2],
    pub records: Vec<AllocationRecord>,
}

/// A prior-predictive pseudo-observed dataset: `θ ~ π_m`, `y ~ f_m(·|θ)`.
pub fn pseudo_observed(
    pair: &ModelPairSpec,
    model: ModelIndex,
    n: usize,
    master_seed: u64,
    stream: u64,
) -> Result<Dataset> {
    let mut rng = derive_stream(master_seed, stream);
    let theta = sample_prior(pair, model, &mut rng);
    simulate_dataset(pair, model, &theta, n, &mut rng)
}

/// For each true model, simulates `replicates` pseudo-observed datasets of
/// size `n` and tabulates how often `rule` allocates them to the other
/// model. Replicate `j` uses data stream `j` and, for ABC sources, a fresh
/// reference table seeded from `(master_seed, j)`.
pub fn false_allocation_rates(
    pair: &ModelPairSpec,
    rule: &DecisionRule,
    replicates: usize,
    n: usize,
    master_seed: u64,
) -> Result<ConfusionSummary> {
    if replicates == 0 {
        return Err(AbcError::InvalidParameter("replicate count must be >= 1".into()));
    }
    let jobs: Vec<(usize, ModelIndex)> = ModelIndex::BOTH
        .iter()
        .enumerate()
        .flat_map(|(k, &m)| (0..replicates).map(move |r| (k * replicates + r, m)))
        .collect();
    let records = jobs
        .par_iter()
        .map(|&(j, true_model)| {
            let data = pseudo_observed(pair, true_model, n, master_seed, j as u64)?;
            let source = rule.source.prepare(pair, n, mix_seed(master_seed, j as u64))?;
            let prob1 = if rule.threshold == 0.0 { 1.0 } else { source.prob1(&data)? };
            Ok(AllocationRecord {
                replicate: j,
                true_model,
                decided: rule.decide(prob1),
                prob1,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let rate = |m: ModelIndex| {
        records
            .iter()
            .filter(|r| r.true_model == m && r.decided != m)
            .count() as f64
            / replicates as f64
    };
    Ok(ConfusionSummary {
        replicates_per_model: replicates,
        rates: [rate(ModelIndex::One), rate(ModelIndex::Two)],
        records,
    })
}

impl ConfusionSummary {
    /// One record per replicate, then a `#` summary line.
    pub fn write_csv<W: Write>(&self, out: W, label: &str) -> Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(["rule", "replicate", "true_model", "decided_model", "prob1"])?;
        for r in &self.records {
            writer.write_record([
                label.to_string(),
                r.replicate.to_string(),
                r.true_model.number().to_string(),
                r.decided.number().to_string(),
                format!("{:.16e}", r.prob1),
            ])?;
        }
        let mut out = writer.into_inner().map_err(|e| AbcError::io("<confusion>", e.into_error()))?;
        writeln!(
            out,
            "# rule={label} R={} misallocation_model1={:.16e} misallocation_model2={:.16e}",
            self.replicates_per_model, self.rates[0], self.rates[1]
        )
        .map_err(|e| AbcError::io("<confusion>", e))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgreementReport {
    pub disagreement_rate: f64,
    /// `None` when either sequence has zero variance.
    pub correlation: Option<f64>,
    pub mean_absolute_error: f64,
    pub count: usize,
}

fn side(p: f64, threshold: f64) -> std::cmp::Ordering {
    p.total_cmp(&threshold)
}

pub fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return None;
    }
    Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Compares `(p_exact, p_abc)` pairs. Two probabilities disagree when they
/// sit on different sides of `threshold`; a value exactly on the threshold
/// is its own side.
pub fn agreement_report(pairs: &[(f64, f64)], threshold: f64) -> Result<AgreementReport> {
    if pairs.len() < 2 {
        return Err(AbcError::InvalidParameter(format!(
            "agreement needs at least 2 pairs, got {}",
            pairs.len()
        )));
    }
    let n = pairs.len() as f64;
    let disagreements = pairs
        .iter()
        .filter(|(a, b)| side(*a, threshold) != side(*b, threshold))
        .count();
    let xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    Ok(AgreementReport {
        disagreement_rate: disagreements as f64 / n,
        correlation: pearson(&xs, &ys),
        mean_absolute_error: pairs.iter().map(|(a, b)| (a - b).abs()).sum::<f64>() / n,
        count: pairs.len(),
    })
}

impl AgreementReport {
    pub fn write_csv<W: Write>(&self, out: W, pairs: &[(f64, f64)]) -> Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(["index", "p_exact", "p_abc"])?;
        for (i, (a, b)) in pairs.iter().enumerate() {
            writer.write_record([i.to_string(), format!("{a:.16e}"), format!("{b:.16e}")])?;
        }
        let mut out = writer.into_inner().map_err(|e| AbcError::io("<agreement>", e.into_error()))?;
        let corr = self
            .correlation
            .map(|c| format!("{c:.16e}"))
            .unwrap_or_else(|| "undefined".to_string());
        writeln!(
            out,
            "# count={} disagreement_rate={:.16e} correlation={corr} mae={:.16e}",
            self.count, self.disagreement_rate, self.mean_absolute_error
        )
        .map_err(|e| AbcError::io("<agreement>", e))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiveNumber {
    pub min: f64,
    pub lower_quartile: f64,
    pub median: f64,
    pub upper_quartile: f64,
    pub max: f64,
}

impl FiveNumber {
    /// Quartiles by linear interpolation between order statistics.
    pub fn of(values: &[f64]) -> Self {
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let q = |p: f64| {
            let pos = p * (v.len() - 1) as f64;
            let lo = pos.floor() as usize;
            let hi = pos.ceil() as usize;
            v[lo] + (pos - lo as f64) * (v[hi] - v[lo])
        };
        FiveNumber {
            min: v[0],
            lower_quartile: q(0.25),
            median: q(0.5),
            upper_quartile: q(0.75),
            max: v[v.len() - 1],
        }
    }

    pub fn iqr(&self) -> f64 {
        self.upper_quartile - self.lower_quartile
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RepeatSeeding {
    /// Repeat `k` uses its own seed derived from the master seed.
    Distinct,
    /// Every repeat reuses the master seed.
    Identical,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilitySummary {
    pub per_dataset: Vec<FiveNumber>,
    /// `values[d][k]`: P(M=1|y_d) in repeat `k`.
    pub values: Vec<Vec<f64>>,
}

/// Re-runs `source` `repeats` times and summarizes the spread of
/// `P(M=1|y)` for every dataset.
pub fn stability_summary(
    pair: &ModelPairSpec,
    source: &ProbabilitySource,
    datasets: &[Dataset],
    repeats: usize,
    master_seed: u64,
    seeding: RepeatSeeding,
) -> Result<StabilitySummary> {
    if repeats < 2 {
        return Err(AbcError::InvalidParameter(format!("need at least 2 repeats, got {repeats}")));
    }
    let Some(first) = datasets.first() else {
        return Ok(StabilitySummary {
            per_dataset: Vec::new(),
            values: Vec::new(),
        });
    };
    let n = first.len();
    let mut values = vec![Vec::with_capacity(repeats); datasets.len()];
    for k in 0..repeats {
        let seed = match seeding {
            RepeatSeeding::Distinct => mix_seed(master_seed, k as u64),
            RepeatSeeding::Identical => master_seed,
        };
        let prepared = source.prepare(pair, n, seed)?;
        let probs = datasets
            .par_iter()
            .map(|d| prepared.prob1(d))
            .collect::<Result<Vec<_>>>()?;
        for (row, p) in values.iter_mut().zip(probs) {
            row.push(p);
        }
    }
    Ok(StabilitySummary {
        per_dataset: values.iter().map(|v| FiveNumber::of(v)).collect(),
        values,
    })
}
