//! Summary statistics.
//!
//! All statistics are computed from the values sorted ascending, which makes
//! them exactly (bitwise) invariant under permutation of the dataset.

use std::fmt;
use std::str::FromStr;

use crate::error::{AbcError, Result};
use crate::sim::Dataset;
use crate::special::ln_factorial;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SummaryStatistic {
    /// `S = Σ yᵢ` (count data).
    Sum,
    /// `(S, Σ ln yᵢ!)` (count data).
    SumAndLogFactProd,
    /// `ȳ`.
    Mean,
    /// `(ȳ, Σ (yᵢ - ȳ)²)`.
    MeanAndSumSq,
    /// The order statistics.
    Identity,
    /// Zero-dimensional statistic carrying no information.
    Constant,
}

impl SummaryStatistic {
    pub fn output_dim(&self, n: usize) -> usize {
        match self {
            SummaryStatistic::Sum | SummaryStatistic::Mean => 1,
            SummaryStatistic::SumAndLogFactProd | SummaryStatistic::MeanAndSumSq => 2,
            SummaryStatistic::Identity => n,
            SummaryStatistic::Constant => 0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SummaryStatistic::Sum => "sum",
            SummaryStatistic::SumAndLogFactProd => "sum-logfact",
            SummaryStatistic::Mean => "mean",
            SummaryStatistic::MeanAndSumSq => "mean-ss",
            SummaryStatistic::Identity => "identity",
            SummaryStatistic::Constant => "constant",
        }
    }

    fn count_only(&self) -> bool {
        matches!(self, SummaryStatistic::Sum | SummaryStatistic::SumAndLogFactProd)
    }
}

impl fmt::Display for SummaryStatistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SummaryStatistic {
    type Err = AbcError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "sum" => SummaryStatistic::Sum,
            "sum-logfact" => SummaryStatistic::SumAndLogFactProd,
            "mean" => SummaryStatistic::Mean,
            "mean-ss" => SummaryStatistic::MeanAndSumSq,
            "identity" => SummaryStatistic::Identity,
            "constant" => SummaryStatistic::Constant,
            other => return Err(AbcError::Parse(format!("unknown statistic '{other}'"))),
        })
    }
}

fn sorted_reals(data: &Dataset) -> Vec<f64> {
    let mut v = data.to_reals();
    v.sort_by(f64::total_cmp);
    v
}

pub fn summarize(stat: SummaryStatistic, data: &Dataset) -> Result<Vec<f64>> {
    if stat.count_only() && data.as_counts().is_none() {
        return Err(AbcError::IncompatibleStatistic {
            statistic: stat.name(),
            data: data.kind(),
        });
    }
    Ok(match stat {
        SummaryStatistic::Sum => {
            let s: u64 = data.as_counts().expect("checked").iter().sum();
            vec![s as f64]
        }
        SummaryStatistic::SumAndLogFactProd => {
            let mut counts = data.as_counts().expect("checked").to_vec();
            counts.sort_unstable();
            let s: u64 = counts.iter().sum();
            let log_prod: f64 = counts.iter().map(|&y| ln_factorial(y)).sum();
            vec![s as f64, log_prod]
        }
        SummaryStatistic::Mean => {
            let v = sorted_reals(data);
            vec![v.iter().sum::<f64>() / v.len() as f64]
        }
        SummaryStatistic::MeanAndSumSq => {
            let v = sorted_reals(data);
            let (mean, ss) = mean_and_sum_sq(&v);
            vec![mean, ss]
        }
        SummaryStatistic::Identity => sorted_reals(data),
        SummaryStatistic::Constant => Vec::new(),
    })
}

/// Two-pass mean and centred sum of squares.
pub(crate) fn mean_and_sum_sq(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let ss = values.iter().map(|y| (y - mean) * (y - mean)).sum();
    (mean, ss)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn worked_values() {
        let y = Dataset::counts(vec![1, 2, 3]).unwrap();
        assert_eq!(summarize(SummaryStatistic::Sum, &y).unwrap(), vec![6.0]);
        assert_eq!(summarize(SummaryStatistic::MeanAndSumSq, &y).unwrap(), vec![2.0, 2.0]);
        let lf = summarize(SummaryStatistic::SumAndLogFactProd, &y).unwrap();
        // 1!·2!·3! = 12
        assert_eq!(lf[0], 6.0);
        assert!((lf[1] - 12f64.ln()).abs() < 1e-15);
        assert!((lf[1] - 2.484_906_649_788_000_3).abs() < 1e-12);
        assert_eq!(
            summarize(SummaryStatistic::Identity, &Dataset::counts(vec![3, 1, 2]).unwrap()).unwrap(),
            vec![1.0, 2.0, 3.0]
        );
        assert!(summarize(SummaryStatistic::Constant, &y).unwrap().is_empty());
    }

    #[test]
    fn count_statistics_reject_real_data() {
        let y = Dataset::reals(vec![0.5, 1.0]).unwrap();
        assert!(matches!(
            summarize(SummaryStatistic::Sum, &y),
            Err(AbcError::IncompatibleStatistic { .. })
        ));
        assert!(summarize(SummaryStatistic::SumAndLogFactProd, &y).is_err());
    }

    #[test]
    fn dims_match_outputs() {
        let y = Dataset::counts(vec![4, 0, 2, 9]).unwrap();
        for stat in [
            SummaryStatistic::Sum,
            SummaryStatistic::SumAndLogFactProd,
            SummaryStatistic::Mean,
            SummaryStatistic::MeanAndSumSq,
            SummaryStatistic::Identity,
            SummaryStatistic::Constant,
        ] {
            assert_eq!(summarize(stat, &y).unwrap().len(), stat.output_dim(4));
            assert_eq!(stat.name().parse::<SummaryStatistic>().unwrap(), stat);
        }
    }

    fn shuffled<T: Clone>(v: &[T], keys: &[u32]) -> Vec<T> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by_key(|&i| keys[i % keys.len()].wrapping_mul(i as u32 + 1));
        idx.into_iter().map(|i| v[i].clone()).collect()
    }

    proptest! {
        #[test]
        fn permutation_invariance_counts(
            values in prop::collection::vec(0u64..500, 1..60),
            keys in prop::collection::vec(any::<u32>(), 1..60),
        ) {
            let a = Dataset::counts(values.clone()).unwrap();
            let b = Dataset::counts(shuffled(&values, &keys)).unwrap();
            for stat in [SummaryStatistic::Sum, SummaryStatistic::SumAndLogFactProd,
                         SummaryStatistic::Mean, SummaryStatistic::MeanAndSumSq,
                         SummaryStatistic::Identity] {
                let x = summarize(stat, &a).unwrap();
                let y = summarize(stat, &b).unwrap();
                prop_assert_eq!(
                    x.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
                    y.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
                );
            }
        }

        #[test]
        fn permutation_invariance_reals(
            values in prop::collection::vec(-1e3f64..1e3, 1..60),
            keys in prop::collection::vec(any::<u32>(), 1..60),
        ) {
            let a = Dataset::reals(values.clone()).unwrap();
            let b = Dataset::reals(shuffled(&values, &keys)).unwrap();
            for stat in [SummaryStatistic::Mean, SummaryStatistic::MeanAndSumSq,
                         SummaryStatistic::Identity] {
                let x = summarize(stat, &a).unwrap();
                let y = summarize(stat, &b).unwrap();
                prop_assert_eq!(
                    x.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
                    y.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
                );
            }
        }
    }
}
