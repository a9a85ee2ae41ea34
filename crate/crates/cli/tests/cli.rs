use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn tpost(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tpost"))
        .args(args)
        .output()
        .unwrap()
}

fn configs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn small_density_config(dir: &Path, tuning: &str) -> PathBuf {
    let mut c: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(configs().join("density.json")).unwrap())
            .unwrap();
    c["replications"] = 20.into();
    c["tuning"] = serde_json::from_str(tuning).unwrap();
    let path = dir.join("config.json");
    std::fs::write(&path, c.to_string()).unwrap();
    path
}

#[test]
fn validate_math_succeeds() {
    let out = tpost(&["validate", "--suite", "math"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().count() >= 2 && text.lines().all(|l| l.starts_with("PASS")));
}

#[test]
fn validate_writes_tuning_summary() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("summary.json");
    let out = tpost(&[
        "validate",
        "--suite",
        "tuning",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["tuning"]["density_quoted"]["lambda"], 0.1);
    assert_eq!(v["tuning"]["poisson_quoted"]["admissible"], false);
    assert!(v["tuning"]["poisson_admissible"]["gamma"].as_f64().unwrap() > 0.0);
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    let out = tpost(&[
        "estimate",
        "--config",
        missing.to_str().unwrap(),
        "--out",
        "x",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(tpost(&["validate", "--bogus"]).status.code(), Some(2));
    assert_eq!(
        tpost(&["validate", "--suite", "nope"]).status.code(),
        Some(2)
    );
    let bad = tpost(&[
        "tuning-search",
        "--framework",
        "poisson",
        "--lambda",
        "1:0:1",
        "--beta",
        "0.1:0.2:0.1",
    ]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn tuning_search_lists_admissible_pairs() {
    let out = tpost(&[
        "tuning-search",
        "--framework",
        "poisson",
        "--lambda",
        "0.005:0.1:0.005",
        "--beta",
        "0.01:0.3:0.01",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let list: Vec<serde_json::Value> = serde_json::from_slice(&out.stdout).unwrap();
    assert!(!list.is_empty());
    let gammas: Vec<f64> = list.iter().map(|p| p["gamma"].as_f64().unwrap()).collect();
    assert!(gammas.iter().all(|g| *g > 0.0));
    assert!(gammas.windows(2).all(|w| w[0] >= w[1]));
}

#[test]
fn complexity_reports_both_radii() {
    let dir = tempfile::tempdir().unwrap();
    let prior = dir.path().join("prior.json");
    let loss = dir.path().join("loss.json");
    std::fs::write(
        &prior,
        r#"{"ids": ["a", "b", "c"], "weights": [0.5, 0.25, 0.25]}"#,
    )
    .unwrap();
    std::fs::write(&loss, r#"{"matrix": [[0, 1, 4], [1, 0, 1], [4, 1, 0]]}"#).unwrap();
    let args = [
        "complexity",
        "--prior",
        prior.to_str().unwrap(),
        "--loss",
        loss.to_str().unwrap(),
        "--gamma",
        "1",
    ];
    let out = tpost(&[&args[..], &["--center", "a"]].concat());
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["pi_complexity"].as_f64().unwrap() <= v["critical_radius"].as_f64().unwrap());
    assert_eq!(
        tpost(&[&args[..], &["--center", "z"]].concat())
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn simulate_writes_points() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("intensity.json");
    std::fs::write(
        &spec,
        r#"{"dim": 1, "cells_per_axis": 4, "values": [10, 20, 30, 40]}"#,
    )
    .unwrap();
    let out_path = dir.path().join("points.csv");
    let run = |seed: &str| {
        let out = tpost(&[
            "simulate",
            "--intensity",
            spec.to_str().unwrap(),
            "--seed",
            seed,
            "--out",
            out_path.to_str().unwrap(),
            "--processes",
            "3",
        ]);
        assert_eq!(out.status.code(), Some(0));
        std::fs::read_to_string(&out_path).unwrap()
    };
    let first = run("5");
    assert!(first.starts_with("process_id,x1\n"));
    assert!(first.lines().count() > 30);
    assert_eq!(first, run("5"));
    assert_ne!(first, run("6"));
}

#[test]
fn estimate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_density_config(dir.path(), r#""search""#);
    let run = |name: &str| {
        let out_dir = dir.path().join(name);
        let out = tpost(&[
            "estimate",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        for f in ["records.csv", "posterior_final.csv", "summary.json"] {
            assert!(out_dir.join(f).exists());
        }
        (
            std::fs::read(out_dir.join("records.csv")).unwrap(),
            std::fs::read(out_dir.join("posterior_final.csv")).unwrap(),
        )
    };
    assert_eq!(run("a"), run("b"));
}

#[test]
fn inadmissible_fixed_tuning_fails() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_density_config(dir.path(), r#"{"lambda": 0.1, "beta": 0.01}"#);
    let out = tpost(&[
        "estimate",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("assumption"));
}

#[test]
fn covariate_renormalisation_warns() {
    let dir = tempfile::tempdir().unwrap();
    let mut c: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(configs().join("sphere_poisson.json")).unwrap(),
    )
    .unwrap();
    c["n"] = 2.into();
    c["replications"] = 2.into();
    c["model"]["candidates"] = 5.into();
    c["model"]["covariates"] = serde_json::json!([[2.0, 0.0, 0.0], [0.0, 1.0, 0.0]]);
    let path = dir.path().join("config.json");
    std::fs::write(&path, c.to_string()).unwrap();
    let out = tpost(&[
        "estimate",
        "--config",
        path.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stderr).contains("renormalised"));
}
