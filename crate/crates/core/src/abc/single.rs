use crate::error::Result;
use crate::sim::{Dataset, ModelIndex, ModelPairSpec};
use crate::stats::summarize;

use super::accept::accept;
use super::config::AbcConfig;
use super::distance::compute_distances;
use super::table::{ReferenceTable, TableMetadata};

#[derive(Debug, Clone, PartialEq)]
pub struct SingleModelOutput {
    /// Accepted parameter draws, in acceptance order.
    pub thetas: Vec<Vec<f64>>,
    pub distances: Vec<f64>,
}

/// Rejection ABC for one model: simulates `config.table_size` prior draws
/// and keeps those whose summaries pass `config.rule` against `y`.
///
/// An empty acceptance set is reported with a warning, not an error.
pub fn abc_single_model(
    pair: &ModelPairSpec,
    model: ModelIndex,
    y: &Dataset,
    config: &AbcConfig,
) -> Result<SingleModelOutput> {
    config.validate()?;
    let metadata = TableMetadata {
        pair: *pair,
        statistic: config.statistic,
        data_size: config.data_size,
        table_size: config.table_size,
        master_seed: config.master_seed,
        model_prior: config.model_prior,
    };
    let table = ReferenceTable::simulate(metadata, |_| model)?;
    let eta_obs = summarize(config.statistic, y)?;
    let distances = compute_distances(&table, &eta_obs, config.metric)?;
    let acc = accept(&table, &distances, config.rule)?;
    if acc.is_empty() {
        log::warn!("no simulation accepted under {}", config.rule);
    }
    Ok(SingleModelOutput {
        thetas: acc.indices.iter().map(|&i| table.theta(i).to_vec()).collect(),
        distances: acc.distances,
    })
}
