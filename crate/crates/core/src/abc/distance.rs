use crate::error::{AbcError, Result};

use super::config::Metric;
use super::table::ReferenceTable;

fn median(values: &mut [f64]) -> f64 {
    let n = values.len();
    let mid = n / 2;
    let (_, upper, _) = values.select_nth_unstable_by(mid, f64::total_cmp);
    let upper = *upper;
    if n % 2 == 1 {
        upper
    } else {
        let lower = values[..mid].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lower + upper)
    }
}

/// Per-coordinate divisor for `metric`: `Some(1.0)` for plain Euclidean, the
/// table's median absolute deviation for the normalized metric, and `None`
/// for coordinates dropped because their MAD is zero.
pub fn coordinate_scales(table: &ReferenceTable, metric: Metric) -> Vec<Option<f64>> {
    let dim = table.summary_dim();
    match metric {
        Metric::Euclidean => vec![Some(1.0); dim],
        Metric::NormalizedEuclidean => (0..dim)
            .map(|j| {
                let mut column: Vec<f64> = (0..table.len()).map(|i| table.summary(i)[j]).collect();
                let centre = median(&mut column);
                for v in column.iter_mut() {
                    *v = (*v - centre).abs();
                }
                let mad = median(&mut column);
                if mad > 0.0 && mad.is_finite() {
                    Some(mad)
                } else {
                    log::warn!("summary coordinate {j} has zero MAD; dropped from the distance");
                    None
                }
            })
            .collect(),
    }
}

/// Distance of every table row's summary to `eta_obs`.
pub fn compute_distances(table: &ReferenceTable, eta_obs: &[f64], metric: Metric) -> Result<Vec<f64>> {
    if eta_obs.len() != table.summary_dim() {
        return Err(AbcError::DimensionMismatch {
            expected: table.summary_dim(),
            got: eta_obs.len(),
        });
    }
    let scales = coordinate_scales(table, metric);
    Ok((0..table.len())
        .map(|i| {
            table
                .summary(i)
                .iter()
                .zip(eta_obs)
                .zip(&scales)
                .filter_map(|((x, o), s)| s.map(|s| ((x - o) / s).powi(2)))
                .sum::<f64>()
                .sqrt()
        })
        .collect())
}
