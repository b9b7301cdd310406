//! Local weighted logistic regression of the model label on the summaries.
//!
//! Fitted by iteratively reweighted least squares (Newton's method) with
//! step halving, at most 50 iterations, stopping when the gradient norm drops
//! below 1e-8. A ridge of 1e-8 keeps the normal equations positive definite.

use nalgebra::{DMatrix, DVector};

use crate::error::{AbcError, Result};
use crate::oracle::ModelPrior;
use crate::sim::ModelIndex;
use crate::special::logistic;

use super::accept::AcceptedSet;
use super::estimate::{EstimatorKind, LogBayesFactor, PosteriorEstimate};
use super::table::ReferenceTable;

/// Probabilities are clamped to `[c, 1 - c]` under complete separation.
pub const SEPARATION_CLAMP: f64 = 1e-6;

const MAX_ITERATIONS: usize = 50;
const GRADIENT_TOL: f64 = 1e-8;
const RIDGE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct LogisticFit {
    /// Intercept first, then one slope per column of the design.
    pub coefficients: Vec<f64>,
    pub iterations: usize,
    pub separation: bool,
}

fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn penalized_loglik(x: &DMatrix<f64>, y: &[f64], w: &[f64], beta: &DVector<f64>) -> f64 {
    let eta = x * beta;
    let fit: f64 = (0..y.len()).map(|i| w[i] * (y[i] * eta[i] - softplus(eta[i]))).sum();
    fit - 0.5 * RIDGE * beta.rows(1, beta.len() - 1).norm_squared()
}

/// Every weighted row fitted to within the clamp of its label.
fn separated(probs: &[f64], y: &[f64], w: &[f64]) -> bool {
    (0..y.len())
        .filter(|&i| w[i] > 0.0)
        .all(|i| (y[i] - probs[i]).abs() < SEPARATION_CLAMP)
}

/// Weighted logistic regression of `y ∈ {0,1}` on `covariates` (one row per
/// observation, intercept added here).
pub fn fit_weighted_logistic(covariates: &DMatrix<f64>, y: &[f64], w: &[f64]) -> Result<LogisticFit> {
    let rows = covariates.nrows();
    let p = covariates.ncols() + 1;
    let mut x = DMatrix::from_element(rows, p, 1.0);
    x.columns_mut(1, p - 1).copy_from(covariates);

    // The intercept is left unpenalized.
    let mut ridge = DVector::from_element(p, RIDGE);
    ridge[0] = 0.0;
    let mut beta = DVector::zeros(p);
    let mut grad_norm = f64::INFINITY;
    for iteration in 0..=MAX_ITERATIONS {
        let eta = &x * &beta;
        let probs: Vec<f64> = eta.iter().map(|e| logistic(*e)).collect();
        let resid = DVector::from_iterator(rows, (0..rows).map(|i| w[i] * (y[i] - probs[i])));
        let grad = x.transpose() * resid - ridge.component_mul(&beta);
        grad_norm = grad.norm();
        if grad_norm < GRADIENT_TOL {
            return Ok(LogisticFit {
                coefficients: beta.iter().copied().collect(),
                iterations: iteration,
                separation: separated(&probs, y, w),
            });
        }
        if iteration == MAX_ITERATIONS {
            break;
        }
        let curvature: Vec<f64> = (0..rows).map(|i| w[i] * probs[i] * (1.0 - probs[i])).collect();
        let mut weighted_x = x.clone();
        for (i, c) in curvature.iter().enumerate() {
            weighted_x.row_mut(i).scale_mut(*c);
        }
        let hessian = x.transpose() * weighted_x + DMatrix::from_diagonal(&ridge);
        let step = match hessian.clone().cholesky() {
            Some(chol) => chol.solve(&grad),
            None => hessian
                .lu()
                .solve(&grad)
                .ok_or_else(|| AbcError::NonConvergence {
                    iterations: iteration,
                    gradient_norm: grad_norm,
                    last_iterate: beta.iter().copied().collect(),
                })?,
        };
        let current = penalized_loglik(&x, y, w, &beta);
        let mut t = 1.0;
        loop {
            let candidate = &beta + &step * t;
            if penalized_loglik(&x, y, w, &candidate) >= current - 1e-12 * current.abs() || t < 1e-10 {
                beta = candidate;
                break;
            }
            t *= 0.5;
        }
    }

    let probs: Vec<f64> = (&x * &beta).iter().map(|e| logistic(*e)).collect();
    if separated(&probs, y, w) {
        Ok(LogisticFit {
            coefficients: beta.iter().copied().collect(),
            iterations: MAX_ITERATIONS,
            separation: true,
        })
    } else {
        Err(AbcError::NonConvergence {
            iterations: MAX_ITERATIONS,
            gradient_norm: grad_norm,
            last_iterate: beta.iter().copied().collect(),
        })
    }
}

/// Estimates `P(M=1 | η_obs)` by a logistic regression of the accepted rows'
/// model labels on `η - η_obs`, weighted by the Epanechnikov kernel
/// `1 - (d/h)²`. `h` defaults to the largest accepted distance.
///
/// Covariates that are constant over the weighted rows are dropped, so a
/// set of identical summaries reduces to the weighted label proportion. The
/// fitted odds are rescaled from the table's simulation prior to `prior`.
pub fn estimate_posterior_logistic(
    acc: &AcceptedSet,
    table: &ReferenceTable,
    eta_obs: &[f64],
    bandwidth: Option<f64>,
    prior: ModelPrior,
) -> Result<PosteriorEstimate> {
    let dim = table.summary_dim();
    if eta_obs.len() != dim {
        return Err(AbcError::DimensionMismatch {
            expected: dim,
            got: eta_obs.len(),
        });
    }
    if acc.len() < dim + 2 {
        return Err(AbcError::TooFewAccepted {
            needed: dim + 2,
            got: acc.len(),
        });
    }
    if let Some(h) = bandwidth {
        if !(h > 0.0) {
            return Err(AbcError::InvalidParameter(format!("bandwidth must be > 0, got {h}")));
        }
    }

    let h = bandwidth.unwrap_or_else(|| acc.distances.iter().copied().fold(0.0, f64::max));
    let mut weights: Vec<f64> = acc
        .distances
        .iter()
        .map(|&d| if h > 0.0 { (1.0 - (d / h).powi(2)).max(0.0) } else { 1.0 })
        .collect();
    if weights.iter().all(|w| *w == 0.0) {
        weights.fill(1.0);
    }

    let labels: Vec<f64> = acc
        .models
        .iter()
        .map(|m| if *m == ModelIndex::One { 1.0 } else { 0.0 })
        .collect();
    let active: Vec<usize> = (0..acc.len()).filter(|&i| weights[i] > 0.0).collect();
    let (n1, n2) = acc.counts();
    let table_prior = table.metadata().model_prior;

    let pure = active.iter().all(|&i| labels[i] == labels[active[0]]);
    let (logit, separation) = if pure {
        let p = if labels[active[0]] == 1.0 {
            1.0 - SEPARATION_CLAMP
        } else {
            SEPARATION_CLAMP
        };
        ((p / (1.0 - p)).ln(), true)
    } else {
        // Centred covariates, standardized by their weighted spread.
        let mut columns: Vec<Vec<f64>> = Vec::new();
        for j in 0..dim {
            let col: Vec<f64> = acc
                .indices
                .iter()
                .map(|&row| table.summary(row)[j] - eta_obs[j])
                .collect();
            let (lo, hi) = active
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| (lo.min(col[i]), hi.max(col[i])));
            if hi - lo <= 1e-12 * lo.abs().max(hi.abs()).max(1.0) {
                continue;
            }
            let wsum: f64 = active.iter().map(|&i| weights[i]).sum();
            let mean = active.iter().map(|&i| weights[i] * col[i]).sum::<f64>() / wsum;
            let sd = (active.iter().map(|&i| weights[i] * (col[i] - mean).powi(2)).sum::<f64>() / wsum).sqrt();
            let scale = if sd > 0.0 { sd } else { 1.0 };
            columns.push(col.into_iter().map(|v| v / scale).collect());
        }
        let covariates = DMatrix::from_fn(acc.len(), columns.len(), |i, j| columns[j][i]);
        let fit = fit_weighted_logistic(&covariates, &labels, &weights)?;
        let intercept = fit.coefficients[0];
        if fit.separation {
            let p = logistic(intercept).clamp(SEPARATION_CLAMP, 1.0 - SEPARATION_CLAMP);
            ((p / (1.0 - p)).ln(), true)
        } else {
            (intercept, false)
        }
    };

    // Rescale odds from the simulation prior to the requested prior.
    let prior_shift = if table_prior.p1() > 0.0 && table_prior.p2() > 0.0 && !separation {
        prior.log_odds() - table_prior.log_odds()
    } else {
        0.0
    };
    let posterior_logit = logit + prior_shift;
    let p1 = logistic(posterior_logit);
    Ok(PosteriorEstimate {
        prob: [p1, 1.0 - p1],
        log_bf: LogBayesFactor::Finite(posterior_logit - prior.log_odds()),
        estimator: EstimatorKind::LocalLogistic,
        rule: acc.rule,
        counts: (n1, n2),
        separation,
    })
}
