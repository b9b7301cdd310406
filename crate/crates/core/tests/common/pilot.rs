//! Pilot-frozen thresholds. Every constant below was produced by
//! `cargo test -p abc-verdict --test pilot -- --ignored --nocapture`,
//! which re-runs the computations in this file from `PILOT_SEED`.

use abc_verdict::abc::{AbcConfig, AcceptanceRule};
use abc_verdict::diagnostics::{
    agreement_report, false_allocation_rates, pseudo_observed, stability_summary, DecisionRule, ProbabilitySource,
    RepeatSeeding,
};
use abc_verdict::experiments::{run_abc_vs_exact, run_fig1, ExperimentId, ExperimentReport, ExperimentSpec};
use abc_verdict::oracle::{log_bayes_factor_eta, log_bayes_factor_full, posterior_prob_from_log_bf};
use abc_verdict::{ModelIndex, ModelPairSpec, ModelPrior, SummaryStatistic};

pub const PILOT_SEED: u64 = 20_240_611;

/// Half-width of the band around a frozen Monte Carlo rate.
pub const RATE_BAND: f64 = 0.05;

// ExactFull misallocation, count pair, n = 100, R = 500.
pub const EXACT_FULL_RATES_N100: [f64; 2] = [0.068, 0.156];

// ExactFull misallocation averaged over both models on n = 10, 50, 100.
pub const EXACT_FULL_MEAN_RATES: [f64; 3] = [0.312, 0.159, 0.112];

// Observed interquartile range of P(M=1|y) over 10 ABC repeats, T = 1e5, 500-NN.
pub const STABILITY_IQR: f64 = 0.0255;

// fig1 at n = 50, 10^4 datasets per model.
pub const FIG1_SD_RATIO: [f64; 2] = [0.050361, 0.041375];
pub const FIG1_MAX_ABS_LOG_B12: [f64; 2] = [33.292, 172105.9];
pub const FIG1_MAX_ABS_LOG_B_ETA: [f64; 2] = [3.3758, 6770.8];

// Disagreement of B12 and B^eta decisions, 10^3 datasets, n = 50.
pub const DIVERGENCE_RATE: f64 = 0.327;

// abc-vs-exact, n = 5, T = 10^6, exact match.
pub const ABC_LOGFACT_CORR_FULL: f64 = 0.99690;
pub const ABC_SUM_CORR_ETA: f64 = 0.99980;
pub const ABC_SUM_CORR_FULL: f64 = 0.56647;

const PG: ModelPairSpec = ModelPairSpec::PoissonGeometric;

pub fn exact_full_rates(n: usize) -> [f64; 2] {
    let rule = DecisionRule::at_half(ProbabilitySource::ExactFull);
    false_allocation_rates(&PG, &rule, 500, n, PILOT_SEED).unwrap().rates
}

pub fn stability_iqr() -> f64 {
    let data = pseudo_observed(&PG, ModelIndex::One, 20, PILOT_SEED, 0).unwrap();
    let config = AbcConfig::new(SummaryStatistic::Sum, 100_000, 20, 0).with_rule(AcceptanceRule::KNearest(500));
    let s = stability_summary(
        &PG,
        &ProbabilitySource::AbcFrequency(config),
        &[data],
        10,
        PILOT_SEED,
        RepeatSeeding::Distinct,
    )
    .unwrap();
    s.per_dataset[0].iqr()
}

pub fn fig1_report() -> ExperimentReport {
    run_fig1(&ExperimentSpec::defaults(ExperimentId::Fig1, PILOT_SEED, "unused")).unwrap()
}

pub fn fig1_value(report: &ExperimentReport, name: &str) -> f64 {
    report.aggregate_value(name).flatten().unwrap()
}

/// `P(M=1|y)` from `B₁₂` and from `B^η` on `count` prior-predictive datasets
/// (first half from model 1).
pub fn exact_probability_pairs(count: usize, n: usize, seed: u64) -> Vec<(f64, f64)> {
    (0..count)
        .map(|j| {
            let m = if j < count / 2 { ModelIndex::One } else { ModelIndex::Two };
            let y = pseudo_observed(&PG, m, n, seed, j as u64).unwrap();
            let full = posterior_prob_from_log_bf(log_bayes_factor_full(&PG, &y).unwrap(), ModelPrior::UNIFORM);
            let eta = posterior_prob_from_log_bf(log_bayes_factor_eta(&PG, &y).unwrap(), ModelPrior::UNIFORM);
            (full, eta)
        })
        .collect()
}

pub fn divergence_rate() -> f64 {
    agreement_report(&exact_probability_pairs(1_000, 50, PILOT_SEED), 0.5)
        .unwrap()
        .disagreement_rate
}

pub fn abc_vs_exact_report(statistic: SummaryStatistic) -> ExperimentReport {
    let mut spec = ExperimentSpec::defaults(ExperimentId::AbcVsExact, PILOT_SEED, "unused");
    spec.statistic = statistic;
    spec.rule = AcceptanceRule::FixedTolerance(0.0);
    spec.table_size = 1_000_000;
    spec.n = 5;
    run_abc_vs_exact(&spec).unwrap()
}
