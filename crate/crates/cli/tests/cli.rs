use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn smoothnash(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_smoothnash")).args(args).output().expect("binary runs")
}

fn json_stdout(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const PENNIES: &str = "2 2\n1 -1\n-1 1\n-1 1\n1 -1\n";

#[test]
fn solve_pennies_with_every_method() {
    let dir = tempfile::tempdir().unwrap();
    let game = write(dir.path(), "pennies.txt", PENNIES);
    for method in ["lp", "lh", "support-enum"] {
        let v = json_stdout(&smoothnash(&["solve", "--method", method, "--game", &game]));
        let eq = &v["equilibria"][0];
        for side in ["x", "y"] {
            for w in eq[side]["weights"].as_array().unwrap() {
                assert!((w.as_f64().unwrap() - 0.5).abs() < 1e-9, "{method}: {v}");
            }
        }
    }
}

#[test]
fn reduce_then_analyze() {
    let dir = tempfile::tempdir().unwrap();
    let source = write(dir.path(), "src.txt", "2 2\n1 0\n0 1\n1 0\n0 1\n");
    let out = dir.path().join("inst");
    let v = json_stdout(&smoothnash(&[
        "reduce", "--source", &source, "--blocks", "2", "--block-len", "4", "--noise", "uniform:0.1", "--seed", "3",
        "--out", out.to_str().unwrap(),
    ]));
    assert_eq!(v["n"], 8);
    assert!(v["gadget_residual"].as_f64().unwrap() <= 1e-12);
    for what in ["partition", "beta", "geometry", "goodness"] {
        let v = json_stdout(&smoothnash(&["analyze", "--input", out.to_str().unwrap(), "--what", what]));
        assert!(v.is_object(), "{what}");
    }
    let v = json_stdout(&smoothnash(&["analyze", "--input", out.to_str().unwrap(), "--what", "beta"]));
    assert!(v["beta_x"].as_f64().unwrap() > 0.0);
}

#[test]
fn reduce_rejects_size_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let source = write(dir.path(), "src.txt", PENNIES);
    let out = smoothnash(&["reduce", "--source", &source, "--blocks", "3", "--seed", "1", "--out", "x"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn probe_is_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for (i, workers) in ["1", "3"].iter().enumerate() {
        let out = dir.path().join(format!("run{i}"));
        let v = json_stdout(&smoothnash(&[
            "probe", "halfspace", "--n", "64", "--trials", "4", "--seed", "9", "--samples", "20", "--dimension", "3",
            "--workers", workers, "--out", out.to_str().unwrap(),
        ]));
        assert_eq!(v["ok"], 4);
        files.push(fs::read(out.join("trials.csv")).unwrap());
        assert!(out.join("summary.json").exists() && out.join("manifest.json").exists());
    }
    assert_eq!(files[0], files[1]);
}

#[test]
fn experiment_run_and_replay() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "cfg.json",
        r#"{"kind":"anti_concentration","trials":5,"seed":2,"n":12,"samples":2000}"#,
    );
    let run = dir.path().join("run");
    json_stdout(&smoothnash(&["experiment", "run", &cfg, "--out", run.to_str().unwrap()]));
    let v = json_stdout(&smoothnash(&["experiment", "replay", run.to_str().unwrap(), "--workers", "2"]));
    assert_eq!(v["identical"], true);
}

#[test]
fn unknown_config_field_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.json", r#"{"kind":"bilinear","trials":1,"seed":0,"n":4,"seeds":3}"#);
    let out = smoothnash(&["experiment", "run", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("seeds"));
}

#[test]
fn verify_bounds_small_ranges() {
    let v = json_stdout(&smoothnash(&["verify-bounds", "entropy", "--n-max", "50"]));
    assert_eq!(v["holds"], true);
    let v = json_stdout(&smoothnash(&["verify-bounds", "binom-tail", "--n-min", "30", "--n-max", "60"]));
    assert_eq!(v["holds"], true);
    let v = json_stdout(&smoothnash(&["verify-bounds", "erdos", "--instances", "50", "--max-n", "8"]));
    assert_eq!(v["holds"], true);
}
