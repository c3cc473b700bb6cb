use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::Command;

use bandex::cli::{self, RunManifest};
use bandex::recovery::{DEFAULT_SV_CUTOFF, DEFAULT_TOL};
use bandex::{tsvd_extrapolate, BandLimitedSignal, Complex64, RecoveryProblem, SampleWindow};
use tempfile::TempDir;

const SIGNAL: &str = r#"{
  "band_limit": "0.4pi",
  "atoms": [
    {"re": 1.0, "im": 0.5, "shift": -3.0, "carrier": 0.2, "bandwidth": 0.6},
    {"re": -0.7, "im": 0.2, "shift": -10.0, "carrier": -0.3, "bandwidth": 0.5},
    {"re": 0.4, "im": -0.9, "shift": 2.5, "carrier": 0.1, "bandwidth": 0.3}
  ]
}"#;

fn bandex(dir: &Path, args: &[&str]) -> i32 {
    let mut full = vec!["bandex", "--quiet", "--out-dir", dir.to_str().unwrap()];
    full.extend_from_slice(args);
    cli::run(full)
}

fn setup() -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("atoms.json"), SIGNAL).unwrap();
    assert_eq!(bandex(dir.path(), &["generate", dir.path().join("atoms.json").to_str().unwrap()]), 0);
    dir
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

/// Parses `t,re,im[,abs_error]` rows, skipping comments and the header.
fn read_trace(path: &str) -> Vec<(f64, Complex64)> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with('t'))
        .map(|l| {
            let f: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            (f[0], Complex64::new(f[1], f[2]))
        })
        .collect()
}

fn hash_line(text: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix("# manifest_hash="))
        .unwrap()
        .to_string()
}

#[test]
fn generate_writes_signal_and_manifest() {
    let dir = setup();
    let written = fs::read_to_string(path(&dir, "signal.json")).unwrap();
    let signal = BandLimitedSignal::from_json(&written).unwrap();
    assert_eq!(signal, BandLimitedSignal::from_json(SIGNAL).unwrap());
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(path(&dir, "generate.manifest.json")).unwrap()).unwrap();
    let hash = manifest["manifest_hash"].as_str().unwrap();
    assert_eq!(hash.len(), 64);
    assert!(written.contains(hash));
    assert_eq!(manifest["inputs"][0]["sha256"].as_str().unwrap(), bandex::experiments::sha256_hex(SIGNAL.as_bytes()));
}

#[test]
fn sample_then_reconstruct_reproduces_samples() {
    let dir = setup();
    let code = bandex(dir.path(), &[
        "sample", "--signal", &path(&dir, "signal.json"), "--tau", "1", "--t0", "0.25",
        "--k-min", "-40", "--k-max", "40",
    ]);
    assert_eq!(code, 0);
    let window_text = fs::read_to_string(path(&dir, "window.csv")).unwrap();
    assert!(window_text.starts_with("# manifest_hash="));
    let window = SampleWindow::read_csv(window_text.as_bytes()).unwrap();
    assert_eq!(window.step(), Some(1.0));
    assert_eq!(window.origin(), Some(0.25));

    assert_eq!(bandex(dir.path(), &["reconstruct", "--window", &path(&dir, "window.csv")]), 0);
    let trace = read_trace(&path(&dir, "trace.csv"));
    assert_eq!(trace.len(), window.len());
    for ((t, v), (k, x)) in trace.iter().zip(window.iter()) {
        assert_eq!(*t, 0.25 + k as f64);
        assert!((v - x).norm() <= 1e-12);
    }
}

#[test]
fn onesided_pipeline_extrapolates() {
    let dir = setup();
    let signal_path = path(&dir, "signal.json");
    assert_eq!(
        bandex(dir.path(), &[
            "sample", "--signal", &signal_path, "--tau", "1", "--k-min", "-127", "--k-max", "128",
            "--drop", "onesided:0",
        ]),
        0
    );
    assert_eq!(
        bandex(dir.path(), &["recover", "--window", &path(&dir, "window.csv"), "--method", "tsvd", "--band", "0.4pi"]),
        0
    );
    let recovered = fs::read_to_string(path(&dir, "recovered.csv")).unwrap();
    assert!(recovered.contains("k,re,im,known,was_known"));
    assert_eq!(
        bandex(dir.path(), &[
            "reconstruct", "--window", &path(&dir, "recovered.csv"), "--grid", "0.5:3.5:4",
            "--signal", &signal_path,
        ]),
        0
    );
    let text = fs::read_to_string(path(&dir, "trace.csv")).unwrap();
    assert!(text.contains("t,re,im,abs_error"));
    let signal = BandLimitedSignal::from_json(SIGNAL).unwrap();
    for (t, v) in read_trace(&path(&dir, "trace.csv")) {
        assert!((v - signal.evaluate(t)).norm() <= 1e-3 * signal.evaluate(t).norm().max(0.1), "t={t}");
    }
}

#[test]
fn recover_output_matches_library() {
    let dir = setup();
    bandex(dir.path(), &[
        "sample", "--signal", &path(&dir, "signal.json"), "--tau", "1", "--k-min", "-63", "--k-max", "64",
        "--drop", "onesided:0",
    ]);
    let window_path = path(&dir, "window.csv");
    assert_eq!(bandex(dir.path(), &["recover", "--window", &window_path, "--method", "tsvd", "--band", "0.4pi"]), 0);
    let got = fs::read_to_string(path(&dir, "recovered.csv")).unwrap();

    let raw = fs::read(&window_path).unwrap();
    let window = SampleWindow::read_csv(raw.as_slice()).unwrap();
    let problem = RecoveryProblem::new(window, 0.4 * PI, 128).unwrap();
    let report = tsvd_extrapolate(&problem, DEFAULT_SV_CUTOFF).unwrap();
    let mut body = Vec::new();
    report.write_csv(&mut body).unwrap();
    let expected = format!("# manifest_hash={}\n{}", hash_line(&got), String::from_utf8(body).unwrap());
    assert_eq!(got, expected);

    let diag: serde_json::Value = serde_json::from_str(&fs::read_to_string(path(&dir, "recovered.json")).unwrap()).unwrap();
    assert_eq!(diag["method"], "tsvd");
    assert_eq!(diag["transform_size"], 128);
    assert_eq!(diag["unknown_count"], 64);
    assert_eq!(diag["manifest_hash"].as_str().unwrap(), hash_line(&got));

    // The manifest hash covers the command, config, inputs and outputs.
    let config = serde_json::json!({
        "window": window_path, "method": "tsvd", "band": 0.4 * PI, "n": 128,
        "max_iter": 10_000, "tol": DEFAULT_TOL, "relaxation": 1.0, "sv_cutoff": DEFAULT_SV_CUTOFF,
        "prefix": "recovered",
    });
    let manifest = RunManifest::new(
        "recover",
        config,
        &[(Path::new(&window_path), &raw)],
        &[&dir.path().join("recovered.csv"), &dir.path().join("recovered.json")],
    )
    .unwrap();
    assert_eq!(manifest.manifest_hash, hash_line(&got));
}

#[test]
fn gap_recovery_through_cli() {
    let dir = setup();
    bandex(dir.path(), &[
        "sample", "--signal", &path(&dir, "signal.json"), "--tau", "1", "--k-min", "-60", "--k-max", "60",
        "--drop", "gaps:-5,0,7",
    ]);
    let code = bandex(dir.path(), &[
        "recover", "--window", &path(&dir, "window.csv"), "--method", "gap", "--band", "0.4pi", "--tol", "1e-13",
    ]);
    assert_eq!(code, 0);
    let r = SampleWindow::read_csv(fs::read(path(&dir, "recovered.csv")).unwrap().as_slice()).unwrap();
    let signal = BandLimitedSignal::from_json(SIGNAL).unwrap();
    for k in [-5i64, 0, 7] {
        assert!((r.get(k).unwrap() - signal.evaluate(k as f64)).norm() <= 1e-3);
    }
}

#[test]
fn exit_codes() {
    let dir = setup();
    let signal_path = path(&dir, "signal.json");
    fs::write(dir.path().join("broken.json"), "{ not json").unwrap();
    fs::write(
        dir.path().join("wide.json"),
        r#"{"band_limit": 1.0, "atoms": [{"re": 1, "im": 0, "shift": 0, "carrier": 0.8, "bandwidth": 0.5}]}"#,
    )
    .unwrap();
    assert_eq!(bandex(dir.path(), &["generate", &path(&dir, "broken.json")]), cli::EXIT_USAGE);
    assert_eq!(bandex(dir.path(), &["generate", &path(&dir, "wide.json")]), cli::EXIT_INVARIANT);
    assert_eq!(bandex(dir.path(), &["frobnicate"]), cli::EXIT_USAGE);
    assert_eq!(bandex(dir.path(), &["generate", &path(&dir, "missing.json")]), cli::EXIT_USAGE);
    assert_eq!(
        cli::run(["bandex", "-q", "--out-dir", "/nonexistent/dir", "generate", &path(&dir, "atoms.json")]),
        cli::EXIT_USAGE
    );
    // Critical-rate one-sided sampling.
    assert_eq!(
        bandex(dir.path(), &[
            "sample", "--signal", &signal_path, "--tau", "2.5", "--k-min", "-10", "--k-max", "10",
            "--drop", "onesided:0",
        ]),
        cli::EXIT_PRECONDITION
    );
    assert_eq!(
        bandex(dir.path(), &[
            "sample", "--signal", &signal_path, "--tau", "1", "--k-min", "-10", "--k-max", "10", "--drop", "sideways",
        ]),
        cli::EXIT_USAGE
    );
    bandex(dir.path(), &[
        "sample", "--signal", &signal_path, "--tau", "1", "--k-min", "-31", "--k-max", "32", "--drop", "onesided:0",
    ]);
    let window = path(&dir, "window.csv");
    assert_eq!(
        bandex(dir.path(), &["recover", "--window", &window, "--method", "pg", "--band", "0.4pi", "--max-iter", "3"]),
        cli::EXIT_NOT_CONVERGED
    );
    assert!(dir.path().join("recovered.csv").exists());
    assert_eq!(
        bandex(dir.path(), &["recover", "--window", &window, "--method", "tsvd", "--band", "0.9pi"]),
        cli::EXIT_PRECONDITION
    );
    assert_eq!(
        bandex(dir.path(), &["recover", "--window", &window, "--method", "gap", "--band", "0.4pi"]),
        cli::EXIT_PRECONDITION
    );
    assert_eq!(
        bandex(dir.path(), &["recover", "--window", &window, "--method", "magic", "--band", "0.4pi"]),
        cli::EXIT_USAGE
    );
    assert_eq!(bandex(dir.path(), &["reconstruct", "--window", &window]), cli::EXIT_PRECONDITION);
    fs::write(dir.path().join("alias.json"), r#"{"kind": "aliasing_demo", "step": 0.4, "band_limit": "pi", "carrier": 0.1, "output": "a.csv"}"#).unwrap();
    assert_eq!(bandex(dir.path(), &["experiment", &path(&dir, "alias.json")]), cli::EXIT_PRECONDITION);
}

#[test]
fn binary_reports_exit_codes() {
    let dir = setup();
    let bin = env!("CARGO_BIN_EXE_bandex");
    let out = Command::new(bin).args(["--help"]).output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("experiment"));
    fs::write(dir.path().join("broken.json"), "{").unwrap();
    let status = Command::new(bin)
        .args(["-q", "--out-dir", dir.path().to_str().unwrap(), "generate", &path(&dir, "broken.json")])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(cli::EXIT_USAGE));
    let out = Command::new(bin).args(["--version"]).output().unwrap();
    assert!(String::from_utf8_lossy(&out.stdout).contains(bandex::VERSION));
}

#[test]
fn experiment_output_is_reproducible() {
    let dir = setup();
    let config = path(&dir, "sweep.json");
    fs::write(
        &config,
        r#"{"kind": "jitter", "sigmas": [0, 1e-4, 1e-2], "trials": 6, "seed": 11, "transform_size": 128, "output": "jitter.csv"}"#,
    )
    .unwrap();
    assert_eq!(bandex(dir.path(), &["experiment", &config]), 0);
    let first = fs::read(path(&dir, "jitter.csv")).unwrap();
    assert_eq!(bandex(dir.path(), &["experiment", &config]), 0);
    assert_eq!(first, fs::read(path(&dir, "jitter.csv")).unwrap());
    let text = String::from_utf8(first.clone()).unwrap();
    assert!(text.contains("# seed=11"));
    assert!(text.contains("# manifest_hash="));
    // A different seed changes the table.
    assert_eq!(bandex(dir.path(), &["--seed", "12", "experiment", &config]), 0);
    let other = fs::read_to_string(path(&dir, "jitter.csv")).unwrap();
    assert!(other.contains("# seed=12"));
    assert_ne!(text, other);
}

#[test]
fn drop_spec_and_time_grid_parsing() {
    use bandex::cli::{parse_time_grid, DropSpec};
    assert_eq!("onesided:-3".parse::<DropSpec>().unwrap(), DropSpec::Onesided(-3));
    assert_eq!("gaps:1, 4,9".parse::<DropSpec>().unwrap(), DropSpec::Gaps(vec![1, 4, 9]));
    assert_eq!("decimate-odd".parse::<DropSpec>().unwrap(), DropSpec::DecimateOdd);
    assert!("gaps:x".parse::<DropSpec>().is_err());
    assert_eq!(parse_time_grid("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
    assert_eq!(parse_time_grid("-pi:pi:2").unwrap(), vec![-PI, PI]);
    assert!(parse_time_grid("0:1:0").is_err());
    assert!(parse_time_grid("0:1").is_err());
}
