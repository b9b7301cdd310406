//! Rejection ABC for a single model and for model choice between the two
//! models of a pair.
//!
//! The pipeline is: simulate a [`ReferenceTable`] from the joint prior, measure
//! each row's summary against the observed one ([`compute_distances`]), keep
//! the closest rows ([`accept`]), and turn the accepted model labels into a
//! posterior estimate ([`estimate_posterior_frequency`] or
//! [`estimate_posterior_logistic`]).

mod accept;
mod config;
mod distance;
mod estimate;
mod logistic;
mod single;
mod table;

pub use accept::{accept, AcceptedSet};
pub use config::{AbcConfig, AcceptanceRule, Metric};
pub use distance::{compute_distances, coordinate_scales};
pub use estimate::{estimate_posterior_frequency, EstimatorKind, LogBayesFactor, PosteriorEstimate};
pub use logistic::{estimate_posterior_logistic, LogisticFit, SEPARATION_CLAMP};
pub use single::{abc_single_model, SingleModelOutput};
pub(crate) use table::fmt_real;
pub use table::{
    generate_reference_table, generate_reference_table_with_workers, ReferenceTable, TableMetadata,
    TableRow,
};

use crate::error::Result;
use crate::sim::{Dataset, ModelPairSpec};
use crate::stats::summarize;

/// Runs the full model-choice pipeline on an existing table.
pub fn abc_model_choice(
    table: &ReferenceTable,
    observed: &Dataset,
    config: &AbcConfig,
    estimator: EstimatorKind,
) -> Result<PosteriorEstimate> {
    let eta_obs = summarize(config.statistic, observed)?;
    let distances = compute_distances(table, &eta_obs, config.metric)?;
    let accepted = accept(table, &distances, config.rule)?;
    match estimator {
        EstimatorKind::Frequency => estimate_posterior_frequency(&accepted, config.model_prior),
        EstimatorKind::LocalLogistic => {
            estimate_posterior_logistic(&accepted, table, &eta_obs, None, config.model_prior)
        }
    }
}

/// Generates a table for `pair` and runs [`abc_model_choice`] on it.
pub fn abc_model_choice_fresh(
    pair: &ModelPairSpec,
    observed: &Dataset,
    config: &AbcConfig,
    estimator: EstimatorKind,
) -> Result<PosteriorEstimate> {
    let table = generate_reference_table(pair, config)?;
    abc_model_choice(&table, observed, config, estimator)
}
