//! C ABI over `abc-verdict`.
//!
//! Objects cross the boundary as opaque handles (`AbcPair`, `AbcDataset`,
//! `AbcTable`) created by `*_new`/`*_generate` functions and released with
//! the matching `*_free`. Every fallible call returns an [`AbcStatus`];
//! results go through out-pointers. On failure, [`abc_last_error`] returns
//! a message for the calling thread.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use libc::c_char;

use abc_verdict::abc::{abc_model_choice, generate_reference_table, AbcConfig, AcceptanceRule, EstimatorKind, ReferenceTable};
use abc_verdict::oracle::{lemma1_limit, posterior_prob_from_log_bf};
use abc_verdict::sim::simulate_dataset;
use abc_verdict::{derive_stream, AbcError, BayesFactors, Dataset, LogValue, ModelIndex, ModelPairSpec, ModelPrior, SummaryStatistic};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AbcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    IncompatibleData = 3,
    UnsupportedStatistic = 4,
    EmptyAcceptedSet = 5,
    TooFewAccepted = 6,
    NonConvergence = 7,
    Domain = 8,
    Parse = 9,
    Io = 10,
    Guard = 11,
    Panic = 99,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AbcStatistic {
    Sum = 0,
    SumLogFact = 1,
    Mean = 2,
    MeanSumSq = 3,
    Identity = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AbcEstimator {
    Frequency = 0,
    LocalLogistic = 1,
}

/// Acceptance rule: `k > 0` keeps the `k` nearest rows, `k == 0` accepts
/// every row within distance `epsilon`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct AbcRule {
    pub k: usize,
    pub epsilon: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct AbcBayesFactors {
    pub log_b12: f64,
    pub log_b_eta: f64,
    pub log_g: f64,
}

pub struct AbcPair(ModelPairSpec);
pub struct AbcDataset(Dataset);
pub struct AbcTable(ReferenceTable);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &AbcError) -> AbcStatus {
    match e {
        AbcError::InvalidParameter(_)
        | AbcError::InvalidModelIndex(_)
        | AbcError::KExceedsTable { .. }
        | AbcError::DimensionMismatch { .. } => AbcStatus::InvalidParameter,
        AbcError::IncompatibleStatistic { .. } | AbcError::IncompatibleData(_) => AbcStatus::IncompatibleData,
        AbcError::UnsupportedStatistic(_) => AbcStatus::UnsupportedStatistic,
        AbcError::EmptyAcceptedSet => AbcStatus::EmptyAcceptedSet,
        AbcError::TooFewAccepted { .. } => AbcStatus::TooFewAccepted,
        AbcError::NonConvergence { .. } => AbcStatus::NonConvergence,
        AbcError::Domain(_) => AbcStatus::Domain,
        AbcError::Parse(_) | AbcError::Csv(_) => AbcStatus::Parse,
        AbcError::Io { .. } => AbcStatus::Io,
        AbcError::Guard(_) => AbcStatus::Guard,
    }
}

enum Failure {
    Null(&'static str),
    Abc(AbcError),
}

impl From<AbcError> for Failure {
    fn from(e: AbcError) -> Self {
        Failure::Abc(e)
    }
}

/// Runs `f`, mapping errors and panics to a status and recording the message.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> AbcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => AbcStatus::Ok,
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            AbcStatus::NullPointer
        }
        Ok(Err(Failure::Abc(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".to_string());
            AbcStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &'static str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &'static str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn statistic(s: AbcStatistic) -> SummaryStatistic {
    match s {
        AbcStatistic::Sum => SummaryStatistic::Sum,
        AbcStatistic::SumLogFact => SummaryStatistic::SumAndLogFactProd,
        AbcStatistic::Mean => SummaryStatistic::Mean,
        AbcStatistic::MeanSumSq => SummaryStatistic::MeanAndSumSq,
        AbcStatistic::Identity => SummaryStatistic::Identity,
    }
}

/// Message for the last failed call on this thread, or NULL. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn abc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Poisson(λ), λ ~ Exp(1) against Geometric(p), p ~ U(0,1).
#[no_mangle]
pub extern "C" fn abc_pair_count_new() -> *mut AbcPair {
    Box::into_raw(Box::new(AbcPair(ModelPairSpec::PoissonGeometric)))
}

/// N(μ, σ₁²) against N(μ, σ₂²), μ ~ N(0, a²).
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn abc_pair_normal_new(sigma1: f64, sigma2: f64, a: f64, out: *mut *mut AbcPair) -> AbcStatus {
    guard(|| {
        let pair = ModelPairSpec::normal(sigma1, sigma2, a)?;
        write_out(out, Box::into_raw(Box::new(AbcPair(pair))), "out")
    })
}

/// # Safety
/// `pair` must be NULL or a handle from `abc_pair_*_new`, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn abc_pair_free(pair: *mut AbcPair) {
    if !pair.is_null() {
        drop(Box::from_raw(pair));
    }
}

/// # Safety
/// `values` must point to `len` readable counts; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn abc_dataset_counts_new(values: *const u64, len: usize, out: *mut *mut AbcDataset) -> AbcStatus {
    guard(|| {
        let data = Dataset::counts(slice(values, len, "values")?.to_vec())?;
        write_out(out, Box::into_raw(Box::new(AbcDataset(data))), "out")
    })
}

/// # Safety
/// `values` must point to `len` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn abc_dataset_reals_new(values: *const f64, len: usize, out: *mut *mut AbcDataset) -> AbcStatus {
    guard(|| {
        let data = Dataset::reals(slice(values, len, "values")?.to_vec())?;
        write_out(out, Box::into_raw(Box::new(AbcDataset(data))), "out")
    })
}

/// Draws `n` observations from model `model` (1 or 2) at parameter `theta`,
/// using stream `stream` of `seed`.
///
/// # Safety
/// `pair` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn abc_dataset_simulate(
    pair: *const AbcPair,
    model: u8,
    theta: f64,
    n: usize,
    seed: u64,
    stream: u64,
    out: *mut *mut AbcDataset,
) -> AbcStatus {
    guard(|| {
        let pair = &deref(pair, "pair")?.0;
        let m = ModelIndex::from_number(model)?;
        let mut rng = derive_stream(seed, stream);
        let data = simulate_dataset(pair, m, &[theta], n, &mut rng)?;
        write_out(out, Box::into_raw(Box::new(AbcDataset(data))), "out")
    })
}

/// Number of observations, or 0 for NULL.
///
/// # Safety
/// `data` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn abc_dataset_len(data: *const AbcDataset) -> usize {
    data.as_ref().map_or(0, |d| d.0.len())
}

/// # Safety
/// `data` must be NULL or a live handle, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn abc_dataset_free(data: *mut AbcDataset) {
    if !data.is_null() {
        drop(Box::from_raw(data));
    }
}

/// Exact `ln B₁₂`, `ln B^η₁₂` and `ln g₁/g₂` for `data`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn abc_bayes_factors(
    pair: *const AbcPair,
    data: *const AbcDataset,
    out: *mut AbcBayesFactors,
) -> AbcStatus {
    guard(|| {
        let f = BayesFactors::compute(&deref(pair, "pair")?.0, &deref(data, "data")?.0)?;
        write_out(
            out,
            AbcBayesFactors {
                log_b12: f.log_b12,
                log_b_eta: f.log_b_eta,
                log_g: f.log_g,
            },
            "out",
        )
    })
}

/// Log of the large-sample `B^η` limit under Poisson(θ₀) data.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn abc_lemma_limit(theta0: f64, out: *mut f64) -> AbcStatus {
    guard(|| write_out(out, lemma1_limit(theta0)?.ln(), "out"))
}

/// `P(M=1|y)` from a log Bayes factor and prior probability `p1` of model 1.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn abc_posterior_prob(log_bf: f64, p1: f64, out: *mut f64) -> AbcStatus {
    guard(|| {
        let prior = ModelPrior::new(p1)?;
        write_out(out, posterior_prob_from_log_bf(LogValue(log_bf), prior), "out")
    })
}

/// Simulates a reference table of `table_size` rows under a uniform model
/// prior, for observed datasets of size `n`.
///
/// # Safety
/// `pair` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn abc_table_generate(
    pair: *const AbcPair,
    stat: AbcStatistic,
    table_size: usize,
    n: usize,
    seed: u64,
    out: *mut *mut AbcTable,
) -> AbcStatus {
    guard(|| {
        let pair = &deref(pair, "pair")?.0;
        let config = AbcConfig::new(statistic(stat), table_size, n, seed);
        config.validate()?;
        let table = generate_reference_table(pair, &config)?;
        write_out(out, Box::into_raw(Box::new(AbcTable(table))), "out")
    })
}

/// # Safety
/// `table` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn abc_table_len(table: *const AbcTable) -> usize {
    table.as_ref().map_or(0, |t| t.0.len())
}

/// Writes the table as CSV to the NUL-terminated UTF-8 `path`.
///
/// # Safety
/// `table` must be live and `path` a valid C string.
#[no_mangle]
pub unsafe extern "C" fn abc_table_write_csv(table: *const AbcTable, path: *const c_char) -> AbcStatus {
    guard(|| {
        let table = &deref(table, "table")?.0;
        if path.is_null() {
            return Err(Failure::Null("path"));
        }
        let path = CStr::from_ptr(path)
            .to_str()
            .map_err(|e| AbcError::Parse(format!("path is not UTF-8: {e}")))?;
        Ok(table.write_csv_file(Path::new(path))?)
    })
}

/// # Safety
/// `table` must be NULL or a live handle, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn abc_table_free(table: *mut AbcTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// ABC estimate of `P(M=1|y)` from `table`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn abc_model_choice_prob(
    table: *const AbcTable,
    data: *const AbcDataset,
    rule: AbcRule,
    estimator: AbcEstimator,
    out: *mut f64,
) -> AbcStatus {
    guard(|| {
        let table = &deref(table, "table")?.0;
        let data = &deref(data, "data")?.0;
        let meta = table.metadata();
        let rule = if rule.k > 0 {
            AcceptanceRule::KNearest(rule.k)
        } else {
            AcceptanceRule::FixedTolerance(rule.epsilon)
        };
        let config = AbcConfig::new(meta.statistic, meta.table_size, meta.data_size, meta.master_seed)
            .with_rule(rule)
            .with_prior(meta.model_prior);
        config.validate()?;
        let estimator = match estimator {
            AbcEstimator::Frequency => EstimatorKind::Frequency,
            AbcEstimator::LocalLogistic => EstimatorKind::LocalLogistic,
        };
        write_out(out, abc_model_choice(table, data, &config, estimator)?.prob1(), "out")
    })
}
