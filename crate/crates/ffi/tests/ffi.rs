use std::ffi::{CStr, CString};
use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use bandex_ffi::*;

const SIGNAL: &str = r#"{"band_limit": "0.4pi", "atoms": [
    {"re": 1.0, "im": 0.5, "shift": -3.0, "carrier": 0.2, "bandwidth": 0.6},
    {"re": -0.7, "im": 0.0, "shift": -10.0, "carrier": -0.3, "bandwidth": 0.5}]}"#;

fn last_error() -> String {
    unsafe { CStr::from_ptr(bandex_last_error()) }.to_string_lossy().into_owned()
}

fn signal() -> *mut BandexSignal {
    let json = CString::new(SIGNAL).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { bandex_signal_from_json(json.as_ptr(), &mut out) }, BandexStatus::Ok);
    out
}

#[test]
fn signal_round_trip_and_evaluation() {
    let s = signal();
    unsafe {
        assert!((bandex_signal_band_limit(s) - 0.4 * PI).abs() < 1e-15);
        let (mut re, mut im) = (0.0, 0.0);
        assert_eq!(bandex_signal_evaluate(s, 0.25, &mut re, &mut im), BandexStatus::Ok);
        let direct = bandex::BandLimitedSignal::from_json(SIGNAL).unwrap().evaluate(0.25);
        assert_eq!((re, im), (direct.re, direct.im));
        bandex_signal_free(s);
    }
}

#[test]
fn out_of_band_signal_reports_invariant() {
    let json = CString::new(r#"{"band_limit": 1.0, "atoms": [{"re":1,"im":0,"shift":0,"carrier":0.6,"bandwidth":0.6}]}"#).unwrap();
    let mut out = ptr::null_mut();
    let status = unsafe { bandex_signal_from_json(json.as_ptr(), &mut out) };
    assert_eq!(status, BandexStatus::Invariant);
    assert!(out.is_null());
    assert!(last_error().contains("> band_limit"), "{}", last_error());

    let json = CString::new("{not json").unwrap();
    assert_eq!(unsafe { bandex_signal_from_json(json.as_ptr(), &mut out) }, BandexStatus::InvalidArgument);
}

#[test]
fn null_pointers_are_rejected() {
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { bandex_signal_from_json(ptr::null(), &mut out) }, BandexStatus::NullPointer);
    assert!(last_error().contains("null"));
    let (mut re, mut im) = (0.0, 0.0);
    assert_eq!(unsafe { bandex_signal_evaluate(ptr::null(), 0.0, &mut re, &mut im) }, BandexStatus::NullPointer);
    unsafe {
        bandex_signal_free(ptr::null_mut());
        bandex_window_free(ptr::null_mut());
        bandex_report_free(ptr::null_mut());
        assert_eq!(bandex_window_len(ptr::null()), 0);
        assert!(bandex_report_condition(ptr::null()).is_nan());
    }
}

#[test]
fn onesided_recovery_matches_library() {
    let s = signal();
    unsafe {
        let mut w = ptr::null_mut();
        assert_eq!(bandex_signal_sample(s, 1.0, 0.0, -127, 128, &mut w), BandexStatus::Ok);
        assert_eq!(bandex_window_mark_onesided(w, 0), BandexStatus::Ok);
        assert_eq!(bandex_window_unknown_count(w), 128);

        let params = bandex_recover_params_default();
        let method = CString::new("tsvd").unwrap();
        let mut report = ptr::null_mut();
        assert_eq!(bandex_recover(w, method.as_ptr(), 0.4 * PI, &params, &mut report), BandexStatus::Ok);
        assert!(bandex_report_converged(report));
        assert!(bandex_report_condition(report) > 1.0);
        assert_eq!(bandex_report_residuals(report, ptr::null_mut(), 0), 1);

        let mut rw = ptr::null_mut();
        assert_eq!(bandex_report_window(report, &mut rw), BandexStatus::Ok);
        let len = bandex_window_len(rw);
        let (mut re, mut im, mut known) = (vec![0.0; len], vec![0.0; len], vec![9u8; len]);
        assert_eq!(
            bandex_window_values(rw, re.as_mut_ptr(), im.as_mut_ptr(), known.as_mut_ptr(), len),
            BandexStatus::Ok
        );
        assert!(known.iter().all(|&b| b == 1));
        assert_eq!(
            bandex_window_values(rw, re.as_mut_ptr(), im.as_mut_ptr(), ptr::null_mut(), len - 1),
            BandexStatus::InvalidArgument
        );

        // Same computation through the Rust API.
        let sig = bandex::BandLimitedSignal::from_json(SIGNAL).unwrap();
        let grid = bandex::SamplingGrid::new(1.0, 0.0, 0).unwrap();
        let mut window = sig.sample(&grid, -127, 128).unwrap();
        window.mark_onesided(0);
        let problem = bandex::RecoveryProblem::new(window, 0.4 * PI, 256).unwrap();
        let direct = bandex::tsvd_extrapolate(&problem, bandex::recovery::DEFAULT_SV_CUTOFF).unwrap();
        for (i, v) in direct.recovered.values().iter().enumerate() {
            assert_eq!((re[i], im[i]), (v.re, v.im));
        }
        for k in 1..=8i64 {
            let truth = sig.evaluate(k as f64);
            let i = (k + 127) as usize;
            assert!((bandex::Complex64::new(re[i], im[i]) - truth).norm() < 1e-3);
        }

        bandex_window_free(rw);
        bandex_report_free(report);
        bandex_window_free(w);
        bandex_signal_free(s);
    }
}

#[test]
fn critical_rate_and_bad_method_fail_cleanly() {
    let values = [1.0f64; 16];
    let zeros = [0.0f64; 16];
    let mut known = [1u8; 16];
    known[8..].iter_mut().for_each(|b| *b = 0);
    unsafe {
        let mut w = ptr::null_mut();
        assert_eq!(
            bandex_window_new(0, values.as_ptr(), zeros.as_ptr(), known.as_ptr(), 16, &mut w),
            BandexStatus::Ok
        );
        let params = bandex_recover_params_default();
        let mut report = ptr::null_mut();
        let pg = CString::new("pg").unwrap();
        assert_eq!(bandex_recover(w, pg.as_ptr(), PI, &params, &mut report), BandexStatus::Precondition);
        assert!(last_error().contains("oversampling required"));
        let bad = CString::new("magic").unwrap();
        assert_eq!(bandex_recover(w, bad.as_ptr(), 0.3, &params, &mut report), BandexStatus::InvalidArgument);
        assert!(report.is_null());

        let few = bandex_recover_params_default();
        let few = BandexRecoverParams { max_iter: 2, tol: 1e-300, ..few };
        assert_eq!(bandex_recover(w, pg.as_ptr(), 0.3, &few, &mut report), BandexStatus::NotConverged);
        assert!(!report.is_null());
        assert_eq!(bandex_report_iterations(report), 2);
        let mut buf = [0.0f64; 8];
        assert_eq!(bandex_report_residuals(report, buf.as_mut_ptr(), buf.len()), 2);
        assert!(buf[0] > 0.0 && buf[1] > 0.0);
        bandex_report_free(report);
        bandex_window_free(w);
    }
}

#[test]
fn certificate_of_full_mask_is_orthonormal() {
    let mask = [1u8, 1];
    let mut c = BandexCertificate {
        sigma_min: 0.0,
        sigma_max: 0.0,
        condition: 0.0,
        known: 0,
        in_band: 0,
    };
    assert_eq!(unsafe { bandex_certificate(mask.as_ptr(), 2, 0.5 * PI, 2, &mut c) }, BandexStatus::Ok);
    assert!((c.condition - 1.0).abs() < 1e-12);
    assert_eq!(unsafe { bandex_certificate(mask.as_ptr(), 2, 4.0, 2, &mut c) }, BandexStatus::InvalidArgument);
}

#[test]
fn sinc_reconstruct_rejects_unknowns() {
    let values = [1.0f64; 4];
    let known = [1u8, 1, 0, 1];
    unsafe {
        let mut w = ptr::null_mut();
        assert_eq!(bandex_window_new(0, values.as_ptr(), values.as_ptr(), known.as_ptr(), 4, &mut w), BandexStatus::Ok);
        let (mut re, mut im) = (0.0, 0.0);
        assert_eq!(bandex_sinc_reconstruct(w, 1.0, 0.0, 0.5, &mut re, &mut im), BandexStatus::Precondition);
        bandex_window_free(w);
        assert_eq!(bandex_window_new(0, values.as_ptr(), values.as_ptr(), ptr::null(), 4, &mut w), BandexStatus::Ok);
        assert_eq!(bandex_sinc_reconstruct(w, 1.0, 0.0, 1.0, &mut re, &mut im), BandexStatus::Ok);
        assert!((re - 1.0).abs() < 1e-15 && (im - 1.0).abs() < 1e-15);
        bandex_window_free(w);
    }
}

#[test]
fn version_is_package_version() {
    let v = unsafe { CStr::from_ptr(bandex_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

/// Builds `tests/c/smoke.c` against the generated header and the static
/// library, then runs it. Skipped when no C compiler is on PATH.
#[test]
fn c_program_links_and_runs() {
    let crate_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|d| d.parent()).unwrap().to_path_buf();
    let lib = profile_dir.join("libbandex_ffi.a");
    if Command::new("cc").arg("--version").output().is_err() || !lib.exists() {
        eprintln!("skipping C smoke test: no cc or {} missing", lib.display());
        return;
    }
    let out = tempfile::tempdir().unwrap();
    let bin = out.path().join("smoke");
    let status = Command::new("cc")
        .arg(crate_dir.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(crate_dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let run = Command::new(&bin).output().unwrap();
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(run.status.success(), "smoke program failed: {stdout} {}", String::from_utf8_lossy(&run.stderr));
    assert!(stdout.contains("max error"));
}
