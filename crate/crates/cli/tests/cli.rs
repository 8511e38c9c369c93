use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn helfrich(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_helfrich")).args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("helfrich-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

fn json(path: &PathBuf) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn constants_prints_c0() {
    let out = helfrich(&["constants"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["c0"].as_f64().unwrap() - 0.8336).abs() < 5e-4);
}

#[test]
fn solve_at_cylinder_weight_returns_cylinder() {
    let out = helfrich(&["solve", "--alpha", "1", "--epsilon", "0.25"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    for u in v["profile"]["values"].as_array().unwrap() {
        assert!((u.as_f64().unwrap() - 1.0).abs() < 1e-8);
    }
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(helfrich(&["solve", "--alpha", "1.2", "--epsilon", "-1"]).status.code(), Some(2));
    assert_eq!(helfrich(&["solve", "--alpha", "1.2"]).status.code(), Some(2));
    assert_eq!(helfrich(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(helfrich(&["solve", "--alpha", "1", "--epsilon", "1", "--seed-profile", "sphere"]).status.code(), Some(2));
}

#[test]
fn domain_errors_exit_1_with_json() {
    let out = helfrich(&["solve", "--alpha", "2", "--epsilon", "1", "--noise", "0.05", "--max-iterations", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "DidNotConverge");
    let out = helfrich(&["oscillation", "--A", "0", "--B", "0", "--a", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn solve_then_verify_round_trips() {
    let dir = scratch("roundtrip");
    let d = dir.to_str().unwrap();
    assert!(helfrich(&["--out-dir", d, "solve", "--alpha", "2", "--epsilon", "1"]).status.success());
    let solution = dir.join("solution.json");
    let out = helfrich(&["--out-dir", d, "verify", "--input", solution.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&dir.join("verify.json"));
    assert!(report["relative_difference"].as_f64().unwrap() <= 1e-12);
    let manifest = json(&dir.join("manifest.json"));
    assert_eq!(manifest["command"], "verify");
    for p in manifest["outputs"].as_array().unwrap() {
        assert!(PathBuf::from(p.as_str().unwrap()).exists());
    }
    assert_eq!(manifest["constants_fingerprint"].as_str().unwrap().len(), 64);
}

#[test]
fn verify_flags_tampered_energy() {
    let dir = scratch("tamper");
    let d = dir.to_str().unwrap();
    assert!(helfrich(&["--out-dir", d, "solve", "--alpha", "1.5", "--epsilon", "0.5"]).status.success());
    let path = dir.join("solution.json");
    let mut v = json(&path);
    let e = v["energy"]["helfrich"].as_f64().unwrap();
    v["energy"]["helfrich"] = (e * (1.0 + 1e-9)).into();
    std::fs::write(&path, v.to_string()).unwrap();
    assert_eq!(helfrich(&["verify", "--input", path.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn sweep_csv_is_deterministic_and_sorted() {
    let args = |jobs: &'static str| {
        [
            "--format", "csv", "--jobs", jobs, "sweep", "--alpha-min", "0.5", "--alpha-max", "2",
            "--alpha-steps", "3", "--epsilon-min", "0", "--epsilon-max", "2", "--epsilon-steps", "3",
            "--noise", "0.01", "--seed", "5",
        ]
    };
    let a = helfrich(&args("1"));
    let b = helfrich(&args("3"));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(!text.contains('\r'));
    let keys: Vec<(f64, f64)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let mut f = l.split(',').map(|s| s.parse::<f64>().unwrap());
            (f.next().unwrap(), f.next().unwrap())
        })
        .collect();
    assert_eq!(keys.len(), 9);
    assert!(keys.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = scratch("config");
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.json");
    std::fs::write(&cfg, r#"{"alpha": 3.0, "samples": 5, "format": "csv"}"#).unwrap();
    let out = helfrich(&["rc", "--config", cfg.to_str().unwrap(), "--alpha", "1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 6);
    // rc(0) at alpha = 1, not 3
    let mid: Vec<f64> = text.lines().nth(3).unwrap().split(',').map(|s| s.parse().unwrap()).collect();
    assert!((mid[1] + 0.0807217).abs() < 1e-6);
}

#[test]
fn csv_numbers_have_17_significant_digits() {
    let out = helfrich(&["--format", "csv", "constants"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let c0 = text.lines().nth(1).unwrap().split(',').nth(1).unwrap();
    let mantissa = c0.split('e').next().unwrap().replace(['.', '-'], "");
    assert_eq!(mantissa.len(), 17);
    assert_eq!(c0.parse::<f64>().unwrap(), helfrich::classical_solutions::compute_constants().c0);
}
