use crate::error::{AbcError, Result};
use crate::sim::ModelIndex;

use super::config::AcceptanceRule;
use super::table::ReferenceTable;

/// Rows kept by an acceptance rule.
#[derive(Debug, Clone, PartialEq)]
pub struct AcceptedSet {
    pub indices: Vec<usize>,
    pub distances: Vec<f64>,
    pub models: Vec<ModelIndex>,
    pub rule: AcceptanceRule,
}

impl AcceptedSet {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// `(N₁, N₂)`.
    pub fn counts(&self) -> (usize, usize) {
        let ones = self.models.iter().filter(|m| **m == ModelIndex::One).count();
        (ones, self.len() - ones)
    }

    /// Builds a set directly from model labels, e.g. for estimator tests.
    pub fn from_counts(n1: usize, n2: usize) -> Self {
        let models: Vec<ModelIndex> = std::iter::repeat_n(ModelIndex::One, n1)
            .chain(std::iter::repeat_n(ModelIndex::Two, n2))
            .collect();
        AcceptedSet {
            indices: (0..models.len()).collect(),
            distances: vec![0.0; models.len()],
            models,
            rule: AcceptanceRule::FixedTolerance(f64::INFINITY),
        }
    }
}

pub fn accept(table: &ReferenceTable, distances: &[f64], rule: AcceptanceRule) -> Result<AcceptedSet> {
    if distances.len() != table.len() {
        return Err(AbcError::DimensionMismatch {
            expected: table.len(),
            got: distances.len(),
        });
    }
    rule.validate(table.len())?;
    let indices: Vec<usize> = match rule {
        AcceptanceRule::FixedTolerance(eps) => (0..distances.len()).filter(|&i| distances[i] <= eps).collect(),
        AcceptanceRule::KNearest(k) => {
            let mut order: Vec<usize> = (0..distances.len()).collect();
            let cmp = |a: &usize, b: &usize| distances[*a].total_cmp(&distances[*b]).then(a.cmp(b));
            if k < order.len() {
                order.select_nth_unstable_by(k - 1, cmp);
                order.truncate(k);
            }
            order.sort_unstable_by(cmp);
            order
        }
    };
    Ok(AcceptedSet {
        distances: indices.iter().map(|&i| distances[i]).collect(),
        models: indices.iter().map(|&i| table.model(i)).collect(),
        indices,
        rule,
    })
}
