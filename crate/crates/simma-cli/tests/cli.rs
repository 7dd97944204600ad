//! End-to-end checks of the binary: exit-code contract, report
//! reproducibility, CSV side tables.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn simma() -> Command {
    Command::new(env!("CARGO_BIN_EXE_simma"))
}

fn write_config(dir: &std::path::Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn tempdir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("simma-cli-test-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

const FV_CONFIG: &str = r#"{
  "components": [
    {"levy": {"family": "tempered_stable", "d1": 1, "d2": 1, "beta": 1.2, "l1": 1, "l2": 1},
     "kernel": {"family": "fractional", "alpha": 0.25},
     "kernel0": "same"}
  ],
  "plan": {"n_max": 8, "replicas": 40, "series_terms": 1500, "seed": 7}
}"#;

const INDETERMINATE_CONFIG: &str = r#"{
  "components": [
    {"levy": {"family": "finite_atoms", "atoms": [[1.0, 1.0], [-1.0, 1.0]]},
     "kernel": {"family": "indicator", "a": 0, "b": 1}}
  ],
  "plan": {"n_max": 8, "replicas": 40, "seed": 7}
}"#;

const ATOMS_BUMP_CONFIG: &str = r#"{
  "components": [
    {"levy": {"family": "finite_atoms", "atoms": [[1.0, 1.0], [-1.0, 1.0]]},
     "kernel": {"family": "smooth_bump", "a": -0.5, "b": 0.5}}
  ],
  "plan": {"n_max": 8, "replicas": 60, "seed": 11}
}"#;

fn run(args: &[&str]) -> Output {
    simma().args(args).output().expect("binary runs")
}

#[test]
fn check_reports_finite_variation_with_exit_zero() {
    let dir = tempdir();
    let cfg = write_config(&dir, "fv.json", FV_CONFIG);
    let out = run(&["check", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["result"]["verdict"]["status"], "finite_variation");
    assert_eq!(report["result"]["verdict"]["justification"], "sufficiency");
    // The resolved configuration is echoed with defaults filled.
    assert_eq!(report["config"]["plan"]["gaussian_compensation"], true);
}

#[test]
fn check_indeterminate_exits_two() {
    let dir = tempdir();
    let cfg = write_config(&dir, "ind.json", INDETERMINATE_CONFIG);
    let out = run(&["check", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["result"]["verdict"]["status"], "indeterminate");
}

#[test]
fn invalid_config_exits_one_and_names_the_field() {
    let dir = tempdir();
    let cfg = write_config(
        &dir,
        "bad.json",
        r#"{"components": [{"kernel": {"family": "indicator", "a": 0, "b": 1}, "mystery": 1}]}"#,
    );
    let out = run(&["check", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("mystery"), "{err}");
}

#[test]
fn purely_deterministic_config_is_rejected() {
    let dir = tempdir();
    let cfg = write_config(
        &dir,
        "det.json",
        r#"{"components": [{"theta": 1.0, "kernel": {"family": "fractional", "alpha": 0.0}, "kernel0": "same"}]}"#,
    );
    let out = run(&["check", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("purely stochastic"), "{err}");
}

#[test]
fn simulate_writes_reproducible_report_and_csv() {
    let dir = tempdir();
    let cfg = write_config(&dir, "sim.json", ATOMS_BUMP_CONFIG);
    let out_a = dir.join("report_a.json");
    let out_b = dir.join("report_b.json");
    let run_a = run(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_a.to_str().unwrap(),
    ]);
    assert_eq!(run_a.status.code(), Some(0), "{}", String::from_utf8_lossy(&run_a.stderr));
    let run_b = run(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_b.to_str().unwrap(),
    ]);
    assert_eq!(run_b.status.code(), Some(0));
    let a = fs::read_to_string(&out_a).unwrap();
    let b = fs::read_to_string(&out_b).unwrap();
    // No timestamps, fixed seed: rerunning the same config reproduces the
    // report byte for byte.
    let a_body = a.replace("report_a", "");
    let b_body = b.replace("report_b", "");
    assert_eq!(a_body, b_body);

    let csv = fs::read_to_string(dir.join("report_a.csv")).unwrap();
    assert!(csv.starts_with("level,mean,std_error"));
    assert_eq!(csv.lines().count(), 10, "level rows 0..=8 plus header");
}

#[test]
fn mbv_levels_are_monotone_within_noise() {
    let dir = tempdir();
    let cfg = write_config(&dir, "mbv.json", ATOMS_BUMP_CONFIG);
    let out = run(&[
        "mbv",
        "--config",
        cfg.to_str().unwrap(),
        "--level",
        "5",
        "--replicas",
        "300",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let levels = report["result"]["per_level"].as_array().unwrap();
    assert_eq!(levels.len(), 6);
}

#[test]
fn zeroone_counterexample_matches_empty_window_probability() {
    let out = run(&[
        "zeroone",
        "--counterexample",
        "--replicas",
        "600",
        "--level",
        "10",
        "--seed",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let frac = report["result"]["experiment"]["fraction_empty_window"]
        .as_f64()
        .unwrap();
    assert!((frac - 0.1353).abs() < 0.05, "empty-window fraction {frac}");
    assert_eq!(report["result"]["classification"]["local"], "not_covered");
}

#[test]
fn identities_battery_passes() {
    let out = run(&["identities"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("PASS stable xi closed form"));
    assert!(!err.contains("FAIL"));
}

#[test]
fn table_classifies_canonical_models() {
    let out = run(&["table"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rows: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 6);
    for row in rows.as_array().unwrap() {
        assert_eq!(row["matches"], true, "{row}");
    }
}

#[test]
fn sandwich_holds_for_symmetric_jump_model() {
    let dir = tempdir();
    let cfg = write_config(&dir, "sand.json", ATOMS_BUMP_CONFIG);
    let out = run(&[
        "sandwich",
        "--config",
        cfg.to_str().unwrap(),
        "--level",
        "3",
        "--replicas",
        "400",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["result"]["within"], true);
}

#[test]
fn bound_reports_value_for_mean_zero_fv_model() {
    let dir = tempdir();
    let cfg = write_config(&dir, "bound.json", ATOMS_BUMP_CONFIG);
    let out = run(&["bound", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["result"]["bound"].as_f64().unwrap() > 0.0);
}
