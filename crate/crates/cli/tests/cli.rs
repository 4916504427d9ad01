use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn scenarios() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn nonloc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nonloc")).args(args).output().expect("binary runs")
}

fn scenario(name: &str) -> String {
    scenarios().join(format!("{name}.toml")).display().to_string()
}

fn error_json(out: &Output) -> Value {
    let stderr = String::from_utf8_lossy(&out.stderr);
    let line = stderr.lines().rev().find(|l| l.starts_with('{')).expect("JSON error line");
    serde_json::from_str(line).unwrap()
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.display().to_string()
}

#[test]
fn check_prints_derived_quantities() {
    let out = nonloc(&["check", &scenario("nc-full-2d")]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("OK xi="), "{stdout}");
    assert!(stdout.contains("hermitian=true"));
}

#[test]
fn invalid_config_exits_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.toml", "[grid]\ndim = 2\npoints = 16\nextent = 4.0\n[nc]\ntheta_z = 2.0\neta_z = -2.0\n");
    let out = nonloc(&["check", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let err = error_json(&out);
    assert!(err["error"]["kind"].is_string());
    assert!(err["error"]["message"].as_str().unwrap().contains("xi"));

    let out = nonloc(&["simulate", "/nonexistent/scenario.toml"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let body = std::fs::read_to_string(scenario("free-1d")).unwrap().replace("[dynamics]", "[dynamics]\nmax_iters = 1");
    let cfg = write_config(dir.path(), "stalled.toml", &body);
    let out = nonloc(&["simulate", &cfg, "--out-dir", &dir.path().join("out").display().to_string()]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(error_json(&out)["error"]["kind"].is_string());
}

#[test]
fn simulate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut summaries = Vec::new();
    for run in ["a", "b"] {
        let out_dir = dir.path().join(run);
        let out = nonloc(&["simulate", &scenario("absorber-1d"), "--out-dir", &out_dir.display().to_string()]);
        assert_eq!(out.status.code(), Some(0));
        summaries.push(std::fs::read(out_dir.join("summary.json")).unwrap());
        let meta: Value = serde_json::from_slice(&std::fs::read(out_dir.join("run_meta.json")).unwrap()).unwrap();
        assert_eq!(meta["scenario"], "absorber-1d");
    }
    assert_eq!(summaries[0], summaries[1]);
}

#[test]
fn batch_mode_writes_one_directory_per_config() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().display().to_string();
    let out = nonloc(&[
        "simulate",
        &scenario("free-1d"),
        &scenario("absorber-1d"),
        "--jobs",
        "2",
        "--sample-every",
        "250",
        "--out-dir",
        &out_dir,
    ]);
    assert_eq!(out.status.code(), Some(0));
    for stem in ["free-1d", "absorber-1d"] {
        let summary: Value =
            serde_json::from_slice(&std::fs::read(dir.path().join(stem).join("summary.json")).unwrap()).unwrap();
        assert_eq!(summary["samples"].as_array().unwrap().len(), if stem == "free-1d" { 4 } else { 2 });
    }
}

#[test]
fn dispersion_prints_csv() {
    let out = nonloc(&["dispersion", "--E", "2", "--V0", "0", "--beta", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<_> = stdout.lines().collect();
    assert_eq!(lines[0], "E,k_root");
    assert_eq!(lines.len(), 2);
    let k: f64 = lines[1].split(',').nth(1).unwrap().parse().unwrap();
    assert!((k - 2.0).abs() < 1e-12);

    let out = nonloc(&["dispersion", "--E", "4.5", "--V0", "5", "--beta", "0.85"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 3);

    let out = nonloc(&["dispersion", "--E", "1", "--V0", "1", "--beta", "1", "--m", "-1"]);
    assert_eq!(out.status.code(), Some(2));
}
