//! End-to-end checks of the `irsec` binary: exit codes, stream contents,
//! and byte-level determinism of the CSV outputs.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn irsec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_irsec")).args(args).output().expect("binary runs")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is UTF-8")
}

fn stderr_str(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is UTF-8")
}

/// Fresh scratch file under the system temp dir, unique per test name.
fn scratch_file(test: &str, name: &str, content: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("irsec-cli-{}-{test}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    fs::write(&path, content).unwrap();
    path
}

/// Small scenario that keeps binary runs fast; the far eavesdropper
/// makes every trial feasible at single-digit rates.
const SMALL_CFG: &str = r#"{
  "m_antennas": 2,
  "n_elements": 3,
  "n_trials": 2,
  "pgd_restarts": 2,
  "n_draws": 50,
  "geometry": { "eve_pos": [0.0, 200.0, 1.8] }
}"#;

#[test]
fn sweep_rate_is_byte_deterministic() {
    let cfg = scratch_file("determinism", "cfg.json", SMALL_CFG);
    let cfg = cfg.to_str().unwrap();
    let args = ["sweep-rate", "--rates", "3,4", "--config", cfg, "--seed", "7"];
    let first = irsec(&args);
    let second = irsec(&args);
    assert!(first.status.success(), "stderr: {}", stderr_str(&first));
    assert_eq!(first.stdout, second.stdout, "same config and seed must give identical bytes");
}

#[test]
fn sweep_rate_csv_contract() {
    let cfg = scratch_file("contract", "cfg.json", SMALL_CFG);
    let out = irsec(&["sweep-rate", "--rates", "3,5", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "stderr: {}", stderr_str(&out));
    let text = stdout_str(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "x,mean_power_w,power_std,feasibility_rate,mean_iterations"
    );
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|s| s.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][0], 3.0);
    assert_eq!(rows[1][0], 5.0);
    for row in &rows {
        assert_eq!(row.len(), 5);
        assert!(row[1] > 0.0, "mean power must be positive, got {}", row[1]);
        assert!((0.0..=1.0).contains(&row[3]));
    }
    assert!(rows[1][1] > rows[0][1], "higher rate must cost more power");
}

#[test]
fn out_flag_writes_the_same_bytes_as_stdout() {
    let cfg = scratch_file("outflag", "cfg.json", SMALL_CFG);
    let cfg = cfg.to_str().unwrap();
    let on_stdout = irsec(&["sweep-rate", "--rates", "3,4", "--config", cfg]);
    assert!(on_stdout.status.success());
    let csv_path = scratch_file("outflag", "sweep.csv", "");
    let to_file = irsec(&[
        "sweep-rate",
        "--rates",
        "3,4",
        "--config",
        cfg,
        "--out",
        csv_path.to_str().unwrap(),
    ]);
    assert!(to_file.status.success());
    assert!(to_file.stdout.is_empty());
    assert_eq!(fs::read(&csv_path).unwrap(), on_stdout.stdout);
}

#[test]
fn empty_config_file_means_defaults() {
    let cfg = scratch_file("empty", "empty.json", "");
    let out = irsec(&["solve", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "stderr: {}", stderr_str(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout_str(&out)).expect("JSON design");
    assert!(v["power_w"].as_f64().unwrap() > 0.0);
    assert_eq!(v["omega"]["entries"].as_array().unwrap().len(), 8);
    assert_eq!(v["phases"]["theta"].as_array().unwrap().len(), 8);
}

#[test]
fn solve_without_config_matches_empty_config() {
    let cfg = scratch_file("noconfig", "empty.json", "");
    let with_file = irsec(&["solve", "--config", cfg.to_str().unwrap()]);
    let without = irsec(&["solve"]);
    assert!(without.status.success());
    assert_eq!(with_file.stdout, without.stdout);
}

#[test]
fn validation_failure_exits_2_listing_all_violations() {
    let cfg = scratch_file(
        "validation",
        "bad.json",
        r#"{"m_antennas": 0, "target_rate_bits": -1.0}"#,
    );
    let out = irsec(&["solve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_str(&out);
    assert!(err.contains("m_antennas"), "stderr: {err}");
    assert!(err.contains("target_rate_bits"), "stderr: {err}");
}

#[test]
fn unknown_config_key_exits_2() {
    let cfg = scratch_file("unknown", "typo.json", r#"{"m_antenas": 4}"#);
    let out = irsec(&["solve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_str(&out).contains("parse"), "stderr: {}", stderr_str(&out));
}

#[test]
fn missing_config_file_exits_2() {
    let out = irsec(&["solve", "--config", "/no/such/file.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_str(&out).contains("io error"), "stderr: {}", stderr_str(&out));
}

#[test]
fn unordered_rates_exit_2() {
    let cfg = scratch_file("unordered", "cfg.json", SMALL_CFG);
    let out = irsec(&["sweep-rate", "--rates", "5,3", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_str(&out).contains("ascending"), "stderr: {}", stderr_str(&out));
}

#[test]
fn statistical_wall_is_exit_1() {
    // equal surface distances and equal fading variance for user and
    // eavesdropper: zero ergodic secrecy rate, so any target is
    // infeasible and the run is infeasibility-dominated
    let cfg = scratch_file(
        "wall",
        "wall.json",
        r#"{
          "m_antennas": 2,
          "n_elements": 3,
          "n_trials": 2,
          "csi_mode": "StatBoth",
          "geometry": {
            "user_pos": [0.0, 90.0, 1.8],
            "eve_pos": [0.0, 110.0, 1.8]
          }
        }"#,
    );
    let cfg = cfg.to_str().unwrap();

    let solve = irsec(&["solve", "--config", cfg]);
    assert_eq!(solve.status.code(), Some(1));
    assert!(stderr_str(&solve).contains("infeasible"), "stderr: {}", stderr_str(&solve));

    let sweep = irsec(&["sweep-rate", "--rates", "1,2", "--config", cfg]);
    assert_eq!(sweep.status.code(), Some(1));
    // the CSV is still produced, with NaN power at zero feasibility
    let text = stdout_str(&sweep);
    assert!(text.starts_with("x,mean_power_w"), "stdout: {text}");
    assert!(text.contains("NaN"), "stdout: {text}");
}

#[test]
fn unwritable_out_path_exits_2() {
    let cfg = scratch_file("unwritable", "cfg.json", SMALL_CFG);
    let out = irsec(&[
        "sweep-rate",
        "--rates",
        "3,4",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        "/nonexistent-dir/sweep.csv",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_str(&out).contains("io error"), "stderr: {}", stderr_str(&out));
}

#[test]
fn oracle_compare_reports_per_instance_gaps() {
    let cfg = scratch_file("oracle", "cfg.json", SMALL_CFG);
    let out = irsec(&["oracle-compare", "--config", cfg.to_str().unwrap(), "--seed", "3"]);
    assert!(out.status.success(), "stderr: {}", stderr_str(&out));
    let text = stdout_str(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "instance,oracle_objective,pgd_objective,sdp_objective,sdp_upper_bound,pgd_gap,sdp_gap"
    );
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|s| s.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 2, "n_trials instances");
    for row in &rows {
        let (oracle, upper) = (row[1], row[4]);
        assert!(upper + 1e-6 >= oracle, "relaxation bound must dominate: {row:?}");
        assert!(row[5] < 1e-2, "pgd gap too large: {row:?}");
        assert!(row[6] < 1e-2, "sdp gap too large: {row:?}");
    }
    assert!(stderr_str(&out).contains("median relative gap"), "{}", stderr_str(&out));
}

#[test]
fn oracle_compare_rejects_large_surfaces() {
    let cfg = scratch_file("oracle-large", "cfg.json", r#"{"n_elements": 6, "n_trials": 1}"#);
    let out = irsec(&["oracle-compare", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn seed_flag_changes_fading_but_not_the_contract() {
    let cfg = scratch_file("seedflag", "cfg.json", SMALL_CFG);
    let cfg = cfg.to_str().unwrap();
    let a = irsec(&["sweep-rate", "--rates", "3", "--config", cfg, "--seed", "1"]);
    let b = irsec(&["sweep-rate", "--rates", "3", "--config", cfg, "--seed", "2"]);
    assert!(a.status.success() && b.status.success());
    assert_ne!(a.stdout, b.stdout, "different seeds should give different draws");
}
