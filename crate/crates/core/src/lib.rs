//! ABC model choice for two analytically tractable model pairs, with exact
//! Bayes-factor oracles to measure how far the ABC answer drifts from the
//! true one.
//!
//! * [`sim`] and [`stats`]: priors, likelihood simulation, summary statistics.
//! * [`oracle`]: closed-form marginals, `B₁₂`, `B^η₁₂` and the discrepancy
//!   ratio `g₁/g₂` linking them.
//! * [`abc`]: reference tables, acceptance, and posterior estimators.
//! * [`diagnostics`]: false allocation rates, agreement and stability.
//! * [`experiments`]: the reproducible runs behind the `abc-verdict` CLI.

pub mod abc;
pub mod diagnostics;
pub mod error;
pub mod experiments;
pub mod oracle;
pub mod rng;
pub mod sim;
pub mod special;
pub mod stats;

pub use error::{AbcError, Result};
pub use oracle::{BayesFactors, LogValue, ModelPrior};
pub use rng::{derive_stream, RngStream};
pub use sim::{Dataset, ModelIndex, ModelPairSpec, Primitive};
pub use stats::SummaryStatistic;
