use std::path::Path;
use std::process::{Command, Output};

use crosslab::verify::LabReport;

fn crosslab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crosslab"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn list_is_sorted_with_statements() {
    let dir = tempfile::tempdir().unwrap();
    let out = crosslab(&["list"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let names: Vec<&str> = text.lines().map(|l| l.split(" — ").next().unwrap()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
    assert_eq!(names.len(), 10);
    assert!(text.contains("exact-sequence-line — Theorem: rows are short exact sequences"));
}

#[test]
fn run_writes_report_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "lab.toml", "trials = 2\n");
    let out = crosslab(
        &["run", "--config", &cfg, "--suite", "fourier", "--suite", "operator-T", "--out", "r.json"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = LabReport::from_json(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert!(report.passed);
    assert_eq!(report.suites.keys().collect::<Vec<_>>(), ["fourier", "operator-T"]);
    let leftovers: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(leftovers.len(), 2, "temporary files left behind: {leftovers:?}");
}

#[test]
fn json_only_prints_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = crosslab(
        &["run", "--suite", "action", "--seed", "5", "--json-only", "--out", "r.json"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let report = LabReport::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(report.suites["action"].metadata.seed, 5);
}

#[test]
fn impossible_tolerance_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "lab.toml", "trials = 2\n[tolerances]\nall = 1e-20\n");
    let out = crosslab(&["run", "--config", &cfg, "--suite", "operator-T", "--out", "r.json"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(dir.path().join("r.json").exists());
}

#[test]
fn usage_and_config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(crosslab(&["run", "--config", "missing.toml"], dir.path()).status.code(), Some(2));
    let bad = write(dir.path(), "bad.toml", "[grid]\npoints = 100\n");
    assert_eq!(crosslab(&["run", "--config", &bad], dir.path()).status.code(), Some(2));
    let typo = write(dir.path(), "typo.toml", "trails = 3\n");
    assert_eq!(crosslab(&["run", "--config", &typo], dir.path()).status.code(), Some(2));
    assert_eq!(crosslab(&["run", "--suite", "nope"], dir.path()).status.code(), Some(2));
    assert_eq!(crosslab(&["frobnicate"], dir.path()).status.code(), Some(2));
    assert_eq!(crosslab(&["convergence", "--suite", "nope"], dir.path()).status.code(), Some(2));
    assert_eq!(
        crosslab(&["convergence", "--suite", "operator-T", "--points", "256,128"], dir.path()).status.code(),
        Some(2)
    );
    assert!(!dir.path().join("crosslab-report.json").exists());
}

#[test]
fn convergence_single_point_writes_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "lab.toml", "trials = 1\n");
    let out = crosslab(
        &["convergence", "--config", &cfg, "--suite", "operator-T", "--points", "256", "--out", "c.csv"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("c.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
    assert!(csv.lines().nth(1).unwrap().starts_with("256,"));
}

#[test]
fn oracle_flag_switches_quadrature() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "lab.toml", "trials = 1\n[grid]\npoints = 128\n");
    let out = crosslab(
        &["run", "--config", &cfg, "--suite", "crossed-algebra", "--oracle", "--json-only"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let report = LabReport::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(report.suites["crossed-algebra"].metadata.quadrature, "direct");
}
