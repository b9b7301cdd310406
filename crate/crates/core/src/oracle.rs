//! Closed-form marginal likelihoods and Bayes factors for the built-in pairs.
//!
//! Count pair, with `S = Σ yᵢ`:
//!
//! * `w₁(y) = S! / ((n+1)^{S+1} ∏ yᵢ!)`, `w₂(y) = n! S! / (n+S+1)!`
//! * `f₁^η(S) = n^S / (n+1)^{S+1}`, `f₂^η(S) = C(n+S-1, S) n! S! / (n+S+1)!`
//! * `g₁/g₂ = C(n+S-1, S) S! n^{-S} / ∏ yᵢ!`
//!
//! Normal pair, with `S² = Σ (yᵢ - ȳ)²`:
//!
//! * `wᵢ(y) = (2π)^{-n/2} σᵢ^{-(n-1)} (σᵢ² + n a²)^{-1/2} exp(-S²/(2σᵢ²) - n ȳ²/(2(σᵢ² + n a²)))`
//! * `fᵢ^η(ȳ) = N(ȳ; 0, a² + σᵢ²/n)`
//! * `g₁/g₂ = (σ₂/σ₁)^{n-1} exp((σ₂⁻² - σ₁⁻²) S² / 2)`
//!
//! For any dataset `ln B₁₂ = ln(g₁/g₂) + ln B^η₁₂`.

use std::f64::consts::PI;

use crate::error::{AbcError, Result};
use crate::sim::{Dataset, ModelIndex, ModelPairSpec};
use crate::special::{ln_beta, ln_choose, ln_multinomial_uniform, logistic};
use crate::stats::{summarize, SummaryStatistic};

/// Natural logarithm of a positive quantity.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LogValue(pub f64);

impl LogValue {
    pub fn ln(self) -> f64 {
        self.0
    }

    pub fn exp(self) -> f64 {
        self.0.exp()
    }
}

impl std::ops::Sub for LogValue {
    type Output = LogValue;

    fn sub(self, rhs: LogValue) -> LogValue {
        LogValue(self.0 - rhs.0)
    }
}

/// Prior probabilities of the two models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelPrior {
    p1: f64,
    p2: f64,
}

impl ModelPrior {
    pub const UNIFORM: ModelPrior = ModelPrior { p1: 0.5, p2: 0.5 };

    /// `p1` may sit on the boundary {0, 1}, which makes the simulation prior
    /// degenerate on a single model.
    pub fn new(p1: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p1) {
            return Err(AbcError::InvalidParameter(format!(
                "model prior p1 must lie in [0, 1], got {p1}"
            )));
        }
        Ok(ModelPrior { p1, p2: 1.0 - p1 })
    }

    pub fn p1(&self) -> f64 {
        self.p1
    }

    pub fn p2(&self) -> f64 {
        self.p2
    }

    pub fn prob(&self, model: ModelIndex) -> f64 {
        match model {
            ModelIndex::One => self.p1,
            ModelIndex::Two => self.p2,
        }
    }

    /// `ln(p1 / p2)`.
    pub fn log_odds(&self) -> f64 {
        self.p1.ln() - self.p2.ln()
    }
}

impl Default for ModelPrior {
    fn default() -> Self {
        ModelPrior::UNIFORM
    }
}

fn count_sum(counts: &[u64]) -> f64 {
    counts.iter().sum::<u64>() as f64
}

fn normal_summary(data: &Dataset) -> (f64, f64) {
    let v = summarize(SummaryStatistic::MeanAndSumSq, data).expect("mean-ss accepts any data");
    (v[0], v[1])
}

pub fn log_marginal_full(pair: &ModelPairSpec, model: ModelIndex, data: &Dataset) -> Result<LogValue> {
    data.check_pair(pair)?;
    let n = data.len() as f64;
    let value = match *pair {
        ModelPairSpec::PoissonGeometric => {
            let y = data.as_counts().expect("checked");
            let s = count_sum(y);
            match model {
                ModelIndex::One => ln_multinomial_uniform(y) - s * (1.0 / n).ln_1p() - (n + 1.0).ln(),
                ModelIndex::Two => ln_beta(n + 1.0, s + 1.0),
            }
        }
        ModelPairSpec::NormalNormal { prior_scale, .. } => {
            let sigma = pair.sigma(model).expect("normal pair");
            let (mean, ss) = normal_summary(data);
            let var = sigma * sigma;
            let pooled = var + n * prior_scale * prior_scale;
            -0.5 * n * (2.0 * PI).ln() - (n - 1.0) * sigma.ln() - 0.5 * pooled.ln()
                - ss / (2.0 * var)
                - n * mean * mean / (2.0 * pooled)
        }
    };
    Ok(LogValue(value))
}

pub fn log_bayes_factor_full(pair: &ModelPairSpec, data: &Dataset) -> Result<LogValue> {
    Ok(log_marginal_full(pair, ModelIndex::One, data)? - log_marginal_full(pair, ModelIndex::Two, data)?)
}

/// The statistic whose marginal the η-oracles know in closed form.
pub fn oracle_statistic(pair: &ModelPairSpec) -> SummaryStatistic {
    if pair.is_count() {
        SummaryStatistic::Sum
    } else {
        SummaryStatistic::Mean
    }
}

/// Prior-predictive density (count pair: pmf) of the statistic `eta` for
/// samples of size `n`.
pub fn log_marginal_eta(
    pair: &ModelPairSpec,
    model: ModelIndex,
    stat: SummaryStatistic,
    eta: &[f64],
    n: usize,
) -> Result<LogValue> {
    if stat != oracle_statistic(pair) {
        return Err(AbcError::UnsupportedStatistic(stat.name()));
    }
    if eta.len() != 1 {
        return Err(AbcError::DimensionMismatch {
            expected: 1,
            got: eta.len(),
        });
    }
    if n == 0 {
        return Err(AbcError::InvalidParameter("sample size must be >= 1".into()));
    }
    let nf = n as f64;
    let value = match *pair {
        ModelPairSpec::PoissonGeometric => {
            let s = eta[0];
            if !(s >= 0.0 && s.fract() == 0.0 && s < 9.0e15) {
                return Err(AbcError::IncompatibleData(format!(
                    "sum statistic must be a non-negative integer, got {s}"
                )));
            }
            match model {
                ModelIndex::One => -s * (1.0 / nf).ln_1p() - (nf + 1.0).ln(),
                ModelIndex::Two => {
                    ln_choose(n as u64 + s as u64 - 1, s as u64) + ln_beta(nf + 1.0, s + 1.0)
                }
            }
        }
        ModelPairSpec::NormalNormal { prior_scale, .. } => {
            let sigma = pair.sigma(model).expect("normal pair");
            let var = prior_scale * prior_scale + sigma * sigma / nf;
            let mean = eta[0];
            -0.5 * (2.0 * PI * var).ln() - mean * mean / (2.0 * var)
        }
    };
    Ok(LogValue(value))
}

pub fn log_bayes_factor_eta(pair: &ModelPairSpec, data: &Dataset) -> Result<LogValue> {
    data.check_pair(pair)?;
    let stat = oracle_statistic(pair);
    let eta = summarize(stat, data)?;
    let n = data.len();
    Ok(log_marginal_eta(pair, ModelIndex::One, stat, &eta, n)?
        - log_marginal_eta(pair, ModelIndex::Two, stat, &eta, n)?)
}

/// `ln g₁(y)/g₂(y)`.
pub fn log_discrepancy_ratio(pair: &ModelPairSpec, data: &Dataset) -> Result<LogValue> {
    data.check_pair(pair)?;
    let n = data.len();
    let value = match *pair {
        ModelPairSpec::PoissonGeometric => {
            let y = data.as_counts().expect("checked");
            let s: u64 = y.iter().sum();
            // ln C(n+S-1, S) + [ln S! - S ln n - Σ ln yᵢ!]
            ln_choose(n as u64 + s - 1, s) + ln_multinomial_uniform(y)
        }
        ModelPairSpec::NormalNormal { sigma1, sigma2, .. } => {
            // Σ₁^{n-1}(yᵢ-ȳ)² + [Σ₁^{n-1}(yᵢ-ȳ)]² collapses to S², since the
            // n-th deviation is minus the sum of the others.
            let (_, ss) = normal_summary(data);
            (n as f64 - 1.0) * (sigma2 / sigma1).ln()
                + 0.5 * (sigma2.powi(-2) - sigma1.powi(-2)) * ss
        }
    };
    Ok(LogValue(value))
}

/// `ln(θ₀⁻¹ (θ₀+1)² e^{-θ₀})`.
pub fn lemma1_limit(theta0: f64) -> Result<LogValue> {
    if !(theta0 > 0.0 && theta0.is_finite()) {
        return Err(AbcError::Domain(format!("theta0 must be positive, got {theta0}")));
    }
    Ok(LogValue(-theta0.ln() + 2.0 * theta0.ln_1p() - theta0))
}

/// `p₁ B / (p₁ B + p₂)`, evaluated as a logistic of the posterior log odds.
pub fn posterior_prob_from_log_bf(log_bf: LogValue, prior: ModelPrior) -> f64 {
    if prior.p1 == 0.0 {
        return 0.0;
    }
    if prior.p2 == 0.0 {
        return 1.0;
    }
    logistic(log_bf.0 + prior.log_odds())
}

/// The three quantities linked by the factorization identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BayesFactors {
    pub log_b12: f64,
    pub log_b_eta: f64,
    pub log_g: f64,
}

impl BayesFactors {
    pub fn compute(pair: &ModelPairSpec, data: &Dataset) -> Result<Self> {
        Ok(BayesFactors {
            log_b12: log_bayes_factor_full(pair, data)?.ln(),
            log_b_eta: log_bayes_factor_eta(pair, data)?.ln(),
            log_g: log_discrepancy_ratio(pair, data)?.ln(),
        })
    }

    /// `ln B₁₂ - ln g - ln B^η`, zero up to rounding.
    pub fn identity_residual(&self) -> f64 {
        self.log_b12 - self.log_g - self.log_b_eta
    }
}
