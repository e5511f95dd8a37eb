use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use kplab::fields::io::read_field;
use serde_json::Value;

fn kplab(config: &str, dir: &Path, extra: &[&str]) -> Output {
    let path = dir.join("experiment.toml");
    fs::write(&path, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_kplab"))
        .arg("--config")
        .arg(&path)
        .arg("--out")
        .arg(dir.join("out"))
        .args(extra)
        .output()
        .unwrap()
}

fn summary(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("out/summary.json")).unwrap()).unwrap()
}

#[test]
fn audit_without_violations_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "subcommand = \"resonance-audit\"\n[physics]\nalpha = 2.0\n[audit]\nk_max = 200\nidentity_points = 1000\n";
    let out = kplab(cfg, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let s = summary(dir.path());
    assert_eq!(s["summary"]["bound_violations"], 0);
    assert_eq!(s["config_echo"]["audit"]["alphas"][0], 2.0);
    let csv = fs::read_to_string(dir.path().join("out/results.csv")).unwrap();
    assert!(csv.starts_with("alpha,k_max,pairs_checked,bound_violations"));
}

#[test]
fn expectation_decides_the_exit_code() {
    let cfg = "subcommand = \"illposed-scaling\"\nexpectation = \"fails\"\n[physics]\nalpha = 2.0\n[illposed]\ns = -0.75\neta_quad_points = 32\n";
    let dir = tempfile::tempdir().unwrap();
    let out = kplab(cfg, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let s = summary(dir.path());
    assert_eq!(s["verdict"], "fails");
    assert_eq!(s["expectation_met"], true);

    let out = kplab(cfg, dir.path(), &["--expect", "bounded"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(summary(dir.path())["expectation_met"], false);
}

#[test]
fn malformed_config_lists_violations() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "subcommand = \"evolve\"\n[grid]\nk_max = 8\ny_points = 100\ny_length = 20.0\n[evolve]\ndt = -1.0\n";
    let out = kplab(cfg, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    let fields: Vec<&str> = err["violations"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v["field"].as_str().unwrap())
        .collect();
    assert!(fields.contains(&"grid.y_points"), "{fields:?}");
    assert!(fields.iter().any(|f| f.starts_with("evolve")), "{fields:?}");
    assert!(!dir.path().join("out").exists());

    let out = kplab("subcommand = \"evolve\"\n[grid]\nk_max = 8\nnonsense = 1\n", dir.path(), &[]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn csv_is_independent_of_worker_count() {
    let cfg = "subcommand = \"strichartz2d\"\n[sweep]\nn = [4, 8, 32]\nseeds = [0, 1]\n";
    let mut runs = Vec::new();
    for workers in ["1", "3"] {
        let dir = tempfile::tempdir().unwrap();
        let out = kplab(cfg, dir.path(), &["--workers", workers]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        runs.push(fs::read(dir.path().join("out/results.csv")).unwrap());
    }
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn seed_flag_reseeds_the_ensemble() {
    let cfg = "subcommand = \"strichartz2d\"\n[sweep]\nn = [4, 8, 32]\nseeds = [0, 1]\nkinds = [\"comparable\"]\n";
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert_eq!(kplab(cfg, a.path(), &[]).status.code(), Some(0));
    assert_eq!(kplab(cfg, b.path(), &["--seed", "40"]).status.code(), Some(0));
    let seeds = summary(b.path())["provenance"]["seeds"].clone();
    assert_eq!(seeds, serde_json::json!([40, 41]));
    let read = |d: &Path| fs::read_to_string(d.join("out/results.csv")).unwrap();
    assert_ne!(read(a.path()), read(b.path()));

    // The echoed configuration alone reproduces the rows.
    let echo = fs::read_to_string(b.path().join("out/config.toml")).unwrap();
    let c = tempfile::tempdir().unwrap();
    assert_eq!(kplab(&echo, c.path(), &[]).status.code(), Some(0));
    assert_eq!(read(b.path()), read(c.path()));
}

#[test]
fn evolve_writes_checkpoints() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "subcommand = \"evolve\"\n[grid]\nk_max = 8\ny_points = 32\ny_length = 40.0\n[evolve]\ndt = 0.01\nt_final = 0.1\ncheckpoint = true\n";
    let out = kplab(cfg, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let f0 = read_field(fs::File::open(dir.path().join("out/fields/initial.bin")).unwrap()).unwrap();
    let f1 = read_field(fs::File::open(dir.path().join("out/fields/final.bin")).unwrap()).unwrap();
    assert!((f0.l2_norm() - f1.l2_norm()).abs() < 1e-10 * f0.l2_norm());
    let rows = fs::read_to_string(dir.path().join("out/results.csv")).unwrap();
    assert_eq!(rows.lines().next(), Some("time,l2,relative_drift"));
    assert_eq!(rows.lines().count(), 12);
}

#[test]
fn expectation_on_evolve_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = kplab("subcommand = \"evolve\"\n", dir.path(), &["--expect", "bounded"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("expectation"));
}
