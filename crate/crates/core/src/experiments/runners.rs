use log::{info, warn};
use rayon::prelude::*;

use crate::abc::{abc_model_choice, generate_reference_table, AbcConfig, EstimatorKind};
use crate::diagnostics::{
    agreement_report, false_allocation_rates, pseudo_observed, ConfusionSummary, DecisionRule, FiveNumber,
    ProbabilitySource,
};
use crate::error::{AbcError, Result};
use crate::oracle::{lemma1_limit, posterior_prob_from_log_bf, BayesFactors, LogValue, ModelPrior};
use crate::rng::{derive_stream, mix_seed};
use crate::sim::{sample_many, simulate_dataset, Dataset, ModelIndex, Primitive};

use super::report::{Cell, ExperimentReport, PlotKind, PlotSpec};
use super::ExperimentSpec;

const FACTOR_COLUMNS: [&str; 3] = ["log_b12", "log_b_eta", "log_g"];
const TABLE_SALT: u64 = 0x7AB1E;

fn factor_cells(f: &BayesFactors) -> [Cell; 3] {
    [Cell::Real(f.log_b12), Cell::Real(f.log_b_eta), Cell::Real(f.log_g)]
}

fn columns(lead: &[&str], tail: &[&str]) -> Vec<String> {
    lead.iter()
        .chain(FACTOR_COLUMNS.iter())
        .chain(tail)
        .map(|s| s.to_string())
        .collect()
}

fn sample_sd(v: &[f64]) -> Option<f64> {
    if v.len() < 2 {
        return None;
    }
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    let ss = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>();
    Some((ss / (v.len() - 1) as f64).sqrt())
}

fn max_abs(v: &[f64]) -> Option<f64> {
    v.iter().map(|x| x.abs()).reduce(f64::max)
}

fn prob_uniform(log_bf: f64) -> f64 {
    posterior_prob_from_log_bf(LogValue(log_bf), ModelPrior::UNIFORM)
}

fn base_meta(report: &mut ExperimentReport, spec: &ExperimentSpec) {
    report.meta("experiment", spec.experiment);
    report.meta("pair", spec.pair.describe());
    report.meta("seed", spec.master_seed);
    report.meta("n", spec.n);
    report.meta("replicates", spec.replicates);
}

/// Prior-predictive datasets, `replicates` per generating model; dataset
/// `k·R + j` comes from stream `k·R + j` of the master seed.
fn prior_predictive(spec: &ExperimentSpec) -> Result<Vec<(ModelIndex, Dataset)>> {
    let r = spec.replicates;
    (0..2 * r)
        .into_par_iter()
        .map(|j| {
            let m = ModelIndex::BOTH[j / r];
            Ok((m, pseudo_observed(&spec.pair, m, spec.n, spec.master_seed, j as u64)?))
        })
        .collect()
}

/// Exact `B₁₂` against `B^η` on prior-predictive count data.
pub fn run_fig1(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    let data = prior_predictive(spec)?;
    let factors = data
        .par_iter()
        .map(|(_, d)| BayesFactors::compute(&spec.pair, d))
        .collect::<Result<Vec<_>>>()?;

    let mut report = ExperimentReport::new(
        spec.experiment,
        columns(&["replicate", "model", "n"], &["p_exact_full", "p_exact_eta"]),
    );
    base_meta(&mut report, spec);
    for (j, ((m, _), f)) in data.iter().zip(&factors).enumerate() {
        let mut row = vec![Cell::Int(j as u64), Cell::Int(m.number() as u64), Cell::Int(spec.n as u64)];
        row.extend(factor_cells(f));
        row.push(Cell::Real(prob_uniform(f.log_b12)));
        row.push(Cell::Real(prob_uniform(f.log_b_eta)));
        report.push_row(row);
    }

    for m in ModelIndex::BOTH {
        let pick = |g: fn(&BayesFactors) -> f64| -> Vec<f64> {
            data.iter().zip(&factors).filter(|((mm, _), _)| *mm == m).map(|(_, f)| g(f)).collect()
        };
        let b12 = pick(|f| f.log_b12);
        let eta = pick(|f| f.log_b_eta);
        let k = m.number();
        let (sd12, sd_eta) = (sample_sd(&b12), sample_sd(&eta));
        report.aggregate(format!("sd_log_b12_model{k}"), sd12);
        report.aggregate(format!("sd_log_b_eta_model{k}"), sd_eta);
        report.aggregate(
            format!("sd_ratio_model{k}"),
            sd12.zip(sd_eta).and_then(|(a, b)| (a > 0.0).then(|| b / a)),
        );
        report.aggregate(format!("max_abs_log_b12_model{k}"), max_abs(&b12));
        report.aggregate(format!("max_abs_log_b_eta_model{k}"), max_abs(&eta));
    }
    agreement_aggregates(&mut report, "eta_vs_full", "p_exact_full", "p_exact_eta");

    report.plot = Some(PlotSpec {
        title: "fig1: exact log Bayes factors (log scale), coloured by generating model".into(),
        kind: PlotKind::Scatter {
            x: "log_b12",
            y: "log_b_eta",
        },
        x_label: "log B12 (true log-Bayes factor)".into(),
        y_label: "log B12^eta (statistic-based log-Bayes factor)".into(),
        group: "model",
    });
    Ok(report)
}

/// Disagreement, correlation and MAE between two probability columns, over
/// rows where both are present.
fn agreement_aggregates(report: &mut ExperimentReport, tag: &str, exact: &str, other: &str) {
    let pairs: Vec<(f64, f64)> = report
        .reals(exact)
        .into_iter()
        .zip(report.reals(other))
        .filter_map(|(a, b)| a.zip(b))
        .collect();
    let (dis, corr, mae) = match agreement_report(&pairs, 0.5) {
        Ok(r) => (Some(r.disagreement_rate), r.correlation, Some(r.mean_absolute_error)),
        Err(_) => (None, None, None),
    };
    report.aggregate(format!("disagreement_{tag}"), dis);
    report.aggregate(format!("correlation_{tag}"), corr);
    report.aggregate(format!("mae_{tag}"), mae);
}

/// `B^η` at growing `n` on data from a fixed distribution: Poisson(θ₀) for
/// the count pair, Uniform(0,1) for the normal pair. Seed `s` uses master
/// seed `mix(seed, s)` with one stream per grid point.
pub fn run_lemma_convergence(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    let grid = spec.n_grid();
    let (source, limit) = if spec.pair.is_count() {
        ("poisson", lemma1_limit(spec.theta0)?.exp())
    } else {
        ("uniform", 1.0)
    };
    let jobs: Vec<(usize, usize)> = (0..spec.replicates)
        .flat_map(|s| (0..grid.len()).map(move |g| (s, g)))
        .collect();
    let factors = jobs
        .par_iter()
        .map(|&(s, g)| {
            let mut rng = derive_stream(mix_seed(spec.master_seed, s as u64), g as u64);
            let n = grid[g];
            let data = if spec.pair.is_count() {
                simulate_dataset(&spec.pair, ModelIndex::One, &[spec.theta0], n, &mut rng)?
            } else {
                Dataset::reals(sample_many(Primitive::Uniform { low: 0.0, high: 1.0 }, n, &mut rng)?)?
            };
            BayesFactors::compute(&spec.pair, &data)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut report = ExperimentReport::new(
        spec.experiment,
        columns(&["replicate", "data", "n", "log10_n"], &["b_eta", "limit", "gap"]),
    );
    base_meta(&mut report, spec);
    if spec.pair.is_count() {
        report.meta("theta0", spec.theta0);
    }
    report.meta("limit", crate::abc::fmt_real(limit));
    let mut gaps = vec![Vec::new(); grid.len()];
    for (&(s, g), f) in jobs.iter().zip(&factors) {
        let b_eta = f.log_b_eta.exp();
        let gap = (b_eta - limit).abs();
        gaps[g].push(gap);
        let mut row = vec![
            Cell::Int(s as u64),
            Cell::Text(source.into()),
            Cell::Int(grid[g] as u64),
            Cell::Real((grid[g] as f64).log10()),
        ];
        row.extend(factor_cells(f));
        row.extend([Cell::Real(b_eta), Cell::Real(limit), Cell::Real(gap)]);
        report.push_row(row);
    }
    for (n, gs) in grid.iter().zip(&gaps) {
        report.aggregate(format!("median_gap_n{n}"), Some(FiveNumber::of(gs).median));
        report.aggregate(format!("max_gap_n{n}"), gs.iter().copied().reduce(f64::max));
    }

    report.plot = Some(PlotSpec {
        title: format!("lemma-convergence: |B^eta - limit| against sample size, limit = {limit:.6}"),
        kind: PlotKind::Scatter { x: "log10_n", y: "gap" },
        x_label: "log10 n".into(),
        y_label: "|B12^eta - limit|".into(),
        group: "data",
    });
    Ok(report)
}

/// `log g₁/g₂` on normal-pair data generated at `μ = 0`.
pub fn run_normal_discrepancy(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    let r = spec.replicates;
    let factors = (0..2 * r)
        .into_par_iter()
        .map(|j| {
            let m = ModelIndex::BOTH[j / r];
            let mut rng = derive_stream(spec.master_seed, j as u64);
            let data = simulate_dataset(&spec.pair, m, &[0.0], spec.n, &mut rng)?;
            Ok((m, BayesFactors::compute(&spec.pair, &data)?))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut report = ExperimentReport::new(spec.experiment, columns(&["replicate", "model", "n"], &[]));
    base_meta(&mut report, spec);
    report.meta("mu", 0);
    for (j, (m, f)) in factors.iter().enumerate() {
        let mut row = vec![Cell::Int(j as u64), Cell::Int(m.number() as u64), Cell::Int(spec.n as u64)];
        row.extend(factor_cells(f));
        report.push_row(row);
    }
    for m in ModelIndex::BOTH {
        let g: Vec<f64> = factors.iter().filter(|(mm, _)| *mm == m).map(|(_, f)| f.log_g).collect();
        let k = m.number();
        report.aggregate(format!("min_log_g_model{k}"), g.iter().copied().reduce(f64::min));
        report.aggregate(format!("max_log_g_model{k}"), g.iter().copied().reduce(f64::max));
    }

    report.plot = Some(PlotSpec {
        title: "normal-discrepancy: log g1/g2 by generating model".into(),
        kind: PlotKind::Histogram { column: "log_g" },
        x_label: "log g1(y)/g2(y)".into(),
        y_label: "count".into(),
        group: "model",
    });
    Ok(report)
}

fn abc_or_na(outcome: Result<f64>, what: &str, j: usize) -> Result<Option<f64>> {
    match outcome {
        Ok(p) => Ok(Some(p)),
        Err(e @ (AbcError::EmptyAcceptedSet | AbcError::TooFewAccepted { .. } | AbcError::NonConvergence { .. })) => {
            warn!("dataset {j}: {what} estimate unavailable ({e})");
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

/// Exact posteriors against ABC estimates on one shared reference table.
/// Datasets `0..⌈R/2⌉` come from model 1, the rest from model 2.
pub fn run_abc_vs_exact(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    let config = AbcConfig::new(
        spec.statistic,
        spec.table_size,
        spec.n,
        mix_seed(spec.master_seed, TABLE_SALT),
    )
    .with_rule(spec.rule);
    config.validate()?;
    info!("simulating {} reference rows", config.table_size);
    let table = generate_reference_table(&spec.pair, &config)?;
    let half = spec.replicates.div_ceil(2);

    let rows = (0..spec.replicates)
        .into_par_iter()
        .map(|j| {
            let m = if j < half { ModelIndex::One } else { ModelIndex::Two };
            let data = pseudo_observed(&spec.pair, m, spec.n, spec.master_seed, j as u64)?;
            let f = BayesFactors::compute(&spec.pair, &data)?;
            let freq = abc_model_choice(&table, &data, &config, EstimatorKind::Frequency).map(|e| e.prob1());
            let logi = abc_model_choice(&table, &data, &config, EstimatorKind::LocalLogistic).map(|e| e.prob1());
            Ok((m, f, abc_or_na(freq, "frequency", j)?, abc_or_na(logi, "logistic", j)?))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut report = ExperimentReport::new(
        spec.experiment,
        columns(
            &["replicate", "model", "n"],
            &["p_exact_full", "p_exact_eta", "p_abc_frequency", "p_abc_logistic"],
        ),
    );
    base_meta(&mut report, spec);
    report.meta("statistic", spec.statistic);
    report.meta("rule", spec.rule);
    report.meta("table_size", spec.table_size);
    for (j, (m, f, freq, logi)) in rows.iter().enumerate() {
        let mut row = vec![Cell::Int(j as u64), Cell::Int(m.number() as u64), Cell::Int(spec.n as u64)];
        row.extend(factor_cells(f));
        row.extend([
            Cell::Real(prob_uniform(f.log_b12)),
            Cell::Real(prob_uniform(f.log_b_eta)),
            Cell::real_or_na(*freq),
            Cell::real_or_na(*logi),
        ]);
        report.push_row(row);
    }
    report.aggregate("na_frequency", Some(rows.iter().filter(|r| r.2.is_none()).count() as f64));
    report.aggregate("na_logistic", Some(rows.iter().filter(|r| r.3.is_none()).count() as f64));
    agreement_aggregates(&mut report, "eta_vs_full", "p_exact_full", "p_exact_eta");
    for est in ["frequency", "logistic"] {
        for target in ["full", "eta"] {
            agreement_aggregates(
                &mut report,
                &format!("{est}_vs_{target}"),
                &format!("p_exact_{target}"),
                &format!("p_abc_{est}"),
            );
        }
    }

    report.plot = Some(PlotSpec {
        title: format!("abc-vs-exact: ABC frequency estimate ({}, {}) against exact posterior", spec.statistic, spec.rule),
        kind: PlotKind::Scatter {
            x: "p_exact_full",
            y: "p_abc_frequency",
        },
        x_label: "exact P(M=1|y)".into(),
        y_label: "ABC P(M=1|eta(y))".into(),
        group: "model",
    });
    Ok(report)
}

/// The decision rules compared by [`run_false_alloc`], with their column tags.
pub fn false_alloc_rules(spec: &ExperimentSpec) -> Vec<(&'static str, DecisionRule)> {
    let config = AbcConfig::new(spec.statistic, spec.table_size, spec.n, spec.master_seed).with_rule(spec.rule);
    vec![
        ("always_model_1", DecisionRule::always_model_one()),
        ("exact_full", DecisionRule::at_half(ProbabilitySource::ExactFull)),
        ("exact_eta", DecisionRule::at_half(ProbabilitySource::ExactEta)),
        ("abc_frequency", DecisionRule::at_half(ProbabilitySource::AbcFrequency(config))),
    ]
}

/// Misallocation rates of several decision rules on the same
/// prior-predictive datasets.
pub fn run_false_alloc(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    let rules = false_alloc_rules(spec);
    if let ProbabilitySource::AbcFrequency(c) = &rules[3].1.source {
        c.validate()?;
    }
    let summaries = rules
        .iter()
        .map(|(tag, rule)| {
            info!("false allocation: {tag}");
            false_allocation_rates(&spec.pair, rule, spec.replicates, spec.n, spec.master_seed)
        })
        .collect::<Result<Vec<ConfusionSummary>>>()?;
    let data = prior_predictive(spec)?;
    let factors = data
        .par_iter()
        .map(|(_, d)| BayesFactors::compute(&spec.pair, d))
        .collect::<Result<Vec<_>>>()?;

    let mut tail = Vec::new();
    for (tag, _) in &rules {
        tail.push(format!("prob1_{tag}"));
        tail.push(format!("decided_{tag}"));
    }
    let tail_refs: Vec<&str> = tail.iter().map(String::as_str).collect();
    let mut report = ExperimentReport::new(spec.experiment, columns(&["replicate", "model", "n"], &tail_refs));
    base_meta(&mut report, spec);
    report.meta("statistic", spec.statistic);
    report.meta("rule", spec.rule);
    report.meta("table_size", spec.table_size);
    for (j, ((m, _), f)) in data.iter().zip(&factors).enumerate() {
        let mut row = vec![Cell::Int(j as u64), Cell::Int(m.number() as u64), Cell::Int(spec.n as u64)];
        row.extend(factor_cells(f));
        for s in &summaries {
            let rec = &s.records[j];
            debug_assert_eq!(rec.true_model, *m);
            row.push(Cell::Real(rec.prob1));
            row.push(Cell::Int(rec.decided.number() as u64));
        }
        report.push_row(row);
    }
    for ((tag, _), s) in rules.iter().zip(&summaries) {
        report.aggregate(format!("misallocation_{tag}_model1"), Some(s.rates[0]));
        report.aggregate(format!("misallocation_{tag}_model2"), Some(s.rates[1]));
    }

    report.plot = Some(PlotSpec {
        title: format!("false-alloc: ABC frequency P(M=1|y) ({}, {}), by true model", spec.statistic, spec.rule),
        kind: PlotKind::Histogram {
            column: "prob1_abc_frequency",
        },
        x_label: "ABC P(M=1|eta(y))".into(),
        y_label: "count".into(),
        group: "model",
    });
    Ok(report)
}
