//! Model pairs, datasets and forward simulation.
//!
//! The geometric model uses support `{0, 1, 2, ...}` with pmf `p (1-p)^y`, so
//! that the sum of `n` draws is negative binomial `Neg(n, p)`. Every closed
//! form in [`crate::oracle`] depends on this convention.

use rand::Rng;
use rand_distr::{Distribution, Exp, Geometric, Normal, Open01, Poisson, Uniform};

use crate::error::{AbcError, Result};
use crate::rng::RngStream;

/// Which of the two models of a pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelIndex {
    One,
    Two,
}

impl ModelIndex {
    pub const BOTH: [ModelIndex; 2] = [ModelIndex::One, ModelIndex::Two];

    pub fn from_number(m: u8) -> Result<Self> {
        match m {
            1 => Ok(ModelIndex::One),
            2 => Ok(ModelIndex::Two),
            other => Err(AbcError::InvalidModelIndex(other)),
        }
    }

    pub fn number(self) -> u8 {
        match self {
            ModelIndex::One => 1,
            ModelIndex::Two => 2,
        }
    }

    pub fn other(self) -> Self {
        match self {
            ModelIndex::One => ModelIndex::Two,
            ModelIndex::Two => ModelIndex::One,
        }
    }
}

/// One of the two built-in comparisons.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelPairSpec {
    /// Model 1: Poisson(λ), λ ~ Exp(1). Model 2: Geometric(p) on {0,1,...},
    /// p ~ U(0,1).
    PoissonGeometric,
    /// Model i: N(μ, σᵢ²) i.i.d., shared prior μ ~ N(0, a²).
    NormalNormal {
        sigma1: f64,
        sigma2: f64,
        prior_scale: f64,
    },
}

impl ModelPairSpec {
    pub fn normal(sigma1: f64, sigma2: f64, prior_scale: f64) -> Result<Self> {
        for (name, v) in [("sigma1", sigma1), ("sigma2", sigma2), ("a", prior_scale)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(AbcError::InvalidParameter(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(ModelPairSpec::NormalNormal {
            sigma1,
            sigma2,
            prior_scale,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModelPairSpec::PoissonGeometric => "pois-geo",
            ModelPairSpec::NormalNormal { .. } => "normal",
        }
    }

    /// Human-readable description including hyperparameters, used in CSV
    /// metadata lines.
    pub fn describe(&self) -> String {
        match self {
            ModelPairSpec::PoissonGeometric => "pois-geo".to_string(),
            ModelPairSpec::NormalNormal {
                sigma1,
                sigma2,
                prior_scale,
            } => format!("normal(sigma1={sigma1},sigma2={sigma2},a={prior_scale})"),
        }
    }

    pub fn is_count(&self) -> bool {
        matches!(self, ModelPairSpec::PoissonGeometric)
    }

    /// Dimension of the parameter vector of either model.
    pub fn parameter_dim(&self) -> usize {
        1
    }

    pub(crate) fn sigma(&self, model: ModelIndex) -> Option<f64> {
        match *self {
            ModelPairSpec::NormalNormal { sigma1, sigma2, .. } => Some(match model {
                ModelIndex::One => sigma1,
                ModelIndex::Two => sigma2,
            }),
            ModelPairSpec::PoissonGeometric => None,
        }
    }
}

/// An i.i.d. sample.
#[derive(Debug, Clone, PartialEq)]
pub enum Dataset {
    Counts(Vec<u64>),
    Reals(Vec<f64>),
}

impl Dataset {
    pub fn counts(values: Vec<u64>) -> Result<Self> {
        if values.is_empty() {
            return Err(AbcError::InvalidParameter("dataset must be non-empty".into()));
        }
        Ok(Dataset::Counts(values))
    }

    pub fn reals(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(AbcError::InvalidParameter("dataset must be non-empty".into()));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(AbcError::InvalidParameter(format!("non-finite observation {bad}")));
        }
        Ok(Dataset::Reals(values))
    }

    /// Parses real values for a pair: count pairs require non-negative
    /// integers.
    pub fn from_values_for(pair: &ModelPairSpec, values: &[f64]) -> Result<Self> {
        if pair.is_count() {
            let counts = values
                .iter()
                .map(|&v| {
                    if v >= 0.0 && v.fract() == 0.0 && v < 9.0e15 {
                        Ok(v as u64)
                    } else {
                        Err(AbcError::IncompatibleData(format!(
                            "count data must be non-negative integers, got {v}"
                        )))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            Dataset::counts(counts)
        } else {
            Dataset::reals(values.to_vec())
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Dataset::Counts(v) => v.len(),
            Dataset::Reals(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Dataset::Counts(_) => "count",
            Dataset::Reals(_) => "real",
        }
    }

    pub fn as_counts(&self) -> Option<&[u64]> {
        match self {
            Dataset::Counts(v) => Some(v),
            Dataset::Reals(_) => None,
        }
    }

    pub fn to_reals(&self) -> Vec<f64> {
        match self {
            Dataset::Counts(v) => v.iter().map(|&y| y as f64).collect(),
            Dataset::Reals(v) => v.clone(),
        }
    }

    pub(crate) fn check_pair(&self, pair: &ModelPairSpec) -> Result<()> {
        match (pair.is_count(), self) {
            (true, Dataset::Counts(_)) | (false, Dataset::Reals(_)) => Ok(()),
            _ => Err(AbcError::IncompatibleData(format!(
                "{} data for the {} pair",
                self.kind(),
                pair.name()
            ))),
        }
    }
}

/// Primitive distributions used by priors and likelihoods.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Primitive {
    Poisson(f64),
    /// Failures before the first success: support {0, 1, 2, ...}.
    Geometric(f64),
    Normal { mean: f64, sd: f64 },
    Exponential(f64),
    Uniform { low: f64, high: f64 },
}

enum Sampler {
    Zero,
    Poisson(Poisson<f64>),
    Geometric(Geometric),
    Normal(Normal<f64>),
    Exponential(Exp<f64>),
    Uniform(Uniform<f64>),
}

impl Sampler {
    #[inline]
    fn draw(&self, rng: &mut RngStream) -> f64 {
        match self {
            Sampler::Zero => 0.0,
            Sampler::Poisson(d) => d.sample(rng),
            Sampler::Geometric(d) => d.sample(rng) as f64,
            Sampler::Normal(d) => d.sample(rng),
            Sampler::Exponential(d) => d.sample(rng),
            Sampler::Uniform(d) => d.sample(rng),
        }
    }
}

impl Primitive {
    fn sampler(&self) -> Result<Sampler> {
        let invalid = |what: String| AbcError::InvalidParameter(what);
        match *self {
            Primitive::Poisson(lambda) => {
                if lambda == 0.0 {
                    Ok(Sampler::Zero)
                } else if lambda > 0.0 && lambda.is_finite() {
                    Poisson::new(lambda)
                        .map(Sampler::Poisson)
                        .map_err(|e| invalid(format!("Poisson({lambda}): {e}")))
                } else {
                    Err(invalid(format!("Poisson rate must be >= 0, got {lambda}")))
                }
            }
            Primitive::Geometric(p) => {
                if p > 0.0 && p <= 1.0 {
                    Geometric::new(p)
                        .map(Sampler::Geometric)
                        .map_err(|e| invalid(format!("Geometric({p}): {e}")))
                } else {
                    Err(invalid(format!("Geometric p must lie in (0, 1], got {p}")))
                }
            }
            Primitive::Normal { mean, sd } => {
                if sd > 0.0 && sd.is_finite() && mean.is_finite() {
                    Normal::new(mean, sd)
                        .map(Sampler::Normal)
                        .map_err(|e| invalid(format!("Normal({mean}, {sd}): {e}")))
                } else {
                    Err(invalid(format!("Normal needs finite mean and sd > 0, got ({mean}, {sd})")))
                }
            }
            Primitive::Exponential(rate) => {
                if rate > 0.0 && rate.is_finite() {
                    Exp::new(rate)
                        .map(Sampler::Exponential)
                        .map_err(|e| invalid(format!("Exponential({rate}): {e}")))
                } else {
                    Err(invalid(format!("Exponential rate must be > 0, got {rate}")))
                }
            }
            Primitive::Uniform { low, high } => {
                if low < high && low.is_finite() && high.is_finite() {
                    Uniform::new(low, high)
                        .map(Sampler::Uniform)
                        .map_err(|e| invalid(format!("Uniform({low}, {high}): {e}")))
                } else {
                    Err(invalid(format!("Uniform needs low < high, got ({low}, {high})")))
                }
            }
        }
    }
}

/// One draw from `dist`.
pub fn sample_primitive(dist: Primitive, rng: &mut RngStream) -> Result<f64> {
    Ok(dist.sampler()?.draw(rng))
}

/// `count` i.i.d. draws from `dist`.
pub fn sample_many(dist: Primitive, count: usize, rng: &mut RngStream) -> Result<Vec<f64>> {
    let sampler = dist.sampler()?;
    Ok((0..count).map(|_| sampler.draw(rng)).collect())
}

/// Draws the model parameter from its prior.
pub fn sample_prior(pair: &ModelPairSpec, model: ModelIndex, rng: &mut RngStream) -> Vec<f64> {
    let value = match (*pair, model) {
        (ModelPairSpec::PoissonGeometric, ModelIndex::One) => {
            Exp::new(1.0).expect("unit rate").sample(rng)
        }
        (ModelPairSpec::PoissonGeometric, ModelIndex::Two) => rng.sample::<f64, _>(Open01),
        (ModelPairSpec::NormalNormal { prior_scale, .. }, _) => {
            Normal::new(0.0, prior_scale).expect("validated scale").sample(rng)
        }
    };
    vec![value]
}

/// `n` i.i.d. observations from model `model` of `pair` at parameter `theta`.
pub fn simulate_dataset(
    pair: &ModelPairSpec,
    model: ModelIndex,
    theta: &[f64],
    n: usize,
    rng: &mut RngStream,
) -> Result<Dataset> {
    if n == 0 {
        return Err(AbcError::InvalidParameter("sample size must be >= 1".into()));
    }
    if theta.len() != pair.parameter_dim() {
        return Err(AbcError::DimensionMismatch {
            expected: pair.parameter_dim(),
            got: theta.len(),
        });
    }
    let t = theta[0];
    match (*pair, model) {
        (ModelPairSpec::PoissonGeometric, m) => {
            let dist = match m {
                ModelIndex::One => Primitive::Poisson(t),
                ModelIndex::Two => Primitive::Geometric(t),
            };
            let sampler = dist.sampler()?;
            let values = (0..n).map(|_| sampler.draw(rng) as u64).collect();
            Ok(Dataset::Counts(values))
        }
        (ModelPairSpec::NormalNormal { .. }, m) => {
            let sd = pair.sigma(m).expect("normal pair");
            let values = sample_many(Primitive::Normal { mean: t, sd }, n, rng)?;
            Ok(Dataset::Reals(values))
        }
    }
}
