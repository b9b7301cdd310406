use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use abc_verdict_ffi::*;

fn counts(y: &[u64]) -> *mut AbcDataset {
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { abc_dataset_counts_new(y.as_ptr(), y.len(), &mut out) }, AbcStatus::Ok);
    out
}

#[test]
fn worked_bayes_factors() {
    let pair = abc_pair_count_new();
    let data = counts(&[1, 1]);
    let mut bf = AbcBayesFactors::default();
    unsafe {
        assert_eq!(abc_bayes_factors(pair, data, &mut bf), AbcStatus::Ok);
        abc_dataset_free(data);
        abc_pair_free(pair);
    }
    assert!((bf.log_b12 - (20.0f64 / 9.0).ln()).abs() < 1e-12);
    assert!((bf.log_b_eta - (40.0f64 / 27.0).ln()).abs() < 1e-12);
    assert!((bf.log_g - 1.5f64.ln()).abs() < 1e-12);
}

#[test]
fn errors_carry_codes_and_messages() {
    unsafe {
        let mut pair = ptr::null_mut();
        assert_eq!(abc_pair_normal_new(0.1, 0.0, 1.0, &mut pair), AbcStatus::InvalidParameter);
        assert!(pair.is_null());
        let msg = CStr::from_ptr(abc_last_error()).to_str().unwrap();
        assert!(msg.contains("sigma"), "{msg}");

        let mut bf = AbcBayesFactors::default();
        assert_eq!(abc_bayes_factors(ptr::null(), ptr::null(), &mut bf), AbcStatus::NullPointer);

        let mut out = 0.0;
        assert_eq!(abc_lemma_limit(-1.0, &mut out), AbcStatus::Domain);
        assert_eq!(abc_posterior_prob(0.0, 1.5, &mut out), AbcStatus::InvalidParameter);

        let count_pair = abc_pair_count_new();
        let reals = [0.5f64, 1.5];
        let mut data = ptr::null_mut();
        assert_eq!(abc_dataset_reals_new(reals.as_ptr(), 2, &mut data), AbcStatus::Ok);
        assert_eq!(abc_bayes_factors(count_pair, data, &mut bf), AbcStatus::IncompatibleData);
        abc_dataset_free(data);
        abc_pair_free(count_pair);
    }
}

#[test]
fn scalar_helpers() {
    let mut out = 0.0;
    unsafe {
        assert_eq!(abc_posterior_prob(0.0, 0.5, &mut out), AbcStatus::Ok);
        assert_eq!(out, 0.5);
        assert_eq!(abc_lemma_limit(1.0, &mut out), AbcStatus::Ok);
    }
    assert!((out - (4.0f64.ln() - 1.0)).abs() < 1e-14);
}

#[test]
fn table_round_trip_and_estimate() {
    let pair = abc_pair_count_new();
    let data = counts(&[0, 2, 1]);
    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().join("t.csv").to_str().unwrap()).unwrap();
    unsafe {
        let mut table = ptr::null_mut();
        assert_eq!(abc_table_generate(pair, AbcStatistic::Sum, 3000, 3, 11, &mut table), AbcStatus::Ok);
        assert_eq!(abc_table_len(table), 3000);
        assert_eq!(abc_table_write_csv(table, path.as_ptr()), AbcStatus::Ok);

        let mut p = -1.0;
        let knn = AbcRule { k: 200, epsilon: 0.0 };
        assert_eq!(abc_model_choice_prob(table, data, knn, AbcEstimator::Frequency, &mut p), AbcStatus::Ok);
        assert!((0.0..=1.0).contains(&p));
        let too_many = AbcRule { k: 5000, epsilon: 0.0 };
        assert_eq!(
            abc_model_choice_prob(table, data, too_many, AbcEstimator::Frequency, &mut p),
            AbcStatus::InvalidParameter
        );
        let nothing = AbcRule { k: 0, epsilon: -1.0 };
        assert_ne!(abc_model_choice_prob(table, data, nothing, AbcEstimator::Frequency, &mut p), AbcStatus::Ok);

        abc_table_free(table);
        abc_dataset_free(data);
        abc_pair_free(pair);
    }
    let text = std::fs::read_to_string(dir.path().join("t.csv")).unwrap();
    assert!(text.lines().any(|l| l.starts_with("# T: 3000")), "{}", &text[..200]);
}

#[test]
fn simulate_through_handles() {
    let pair = abc_pair_count_new();
    unsafe {
        let mut a = ptr::null_mut();
        let mut b = ptr::null_mut();
        assert_eq!(abc_dataset_simulate(pair, 1, 2.0, 25, 5, 0, &mut a), AbcStatus::Ok);
        assert_eq!(abc_dataset_simulate(pair, 1, 2.0, 25, 5, 0, &mut b), AbcStatus::Ok);
        assert_eq!(abc_dataset_len(a), 25);
        let (mut fa, mut fb) = (AbcBayesFactors::default(), AbcBayesFactors::default());
        abc_bayes_factors(pair, a, &mut fa);
        abc_bayes_factors(pair, b, &mut fb);
        assert_eq!(fa.log_b12.to_bits(), fb.log_b12.to_bits());
        let mut c = ptr::null_mut();
        assert_eq!(abc_dataset_simulate(pair, 3, 2.0, 25, 5, 0, &mut c), AbcStatus::InvalidParameter);
        abc_dataset_free(a);
        abc_dataset_free(b);
        abc_pair_free(pair);
    }
}

fn target_dir() -> PathBuf {
    // <target>/<profile>/deps/<test binary>
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_header() {
    let lib_dir = target_dir();
    let lib = lib_dir.join("libabc_verdict_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler or static library at {}", lib.display());
        return;
    }
    let crate_dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let out = tempfile::tempdir().unwrap();
    let exe = out.path().join("smoke");
    let status = Command::new("cc")
        .arg(crate_dir.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(crate_dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C smoke program failed to compile");
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "ok");
}
