use std::fs;

use smoothed_nash::harness::*;
use smoothed_nash::reduction::NoiseSpec;
use smoothed_nash::structure::{GameGenerator, ReducedGenerator, SolverChoice};

#[test]
fn same_config_twice_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::new(ExperimentKind::Geometry, 25, 8);
    cfg.n = 7;
    cfg.generator = Some(GameGenerator::ZeroSumUniform);
    let mut outputs = Vec::new();
    for name in ["a", "b"] {
        cfg.output_dir = Some(dir.path().join(name));
        run_experiment(&cfg).unwrap();
        outputs.push(fs::read(dir.path().join(name).join(TRIALS_FILE)).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    let manifest = fs::read_to_string(dir.path().join("a").join(MANIFEST_FILE)).unwrap();
    assert!(manifest.contains("\"schema_version\": 1"));
}

#[test]
fn timeouts_are_recorded_per_trial() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::new(ExperimentKind::Geometry, 2, 1);
    cfg.generator = Some(GameGenerator::ReducedInstance(ReducedGenerator {
        b: 4,
        ell: 64,
        noise: NoiseSpec::uniform(0.1),
        general_x: false,
        scale_third: false,
        signal_scale: 1.0,
        source: None,
    }));
    cfg.solver = SolverChoice::LemkeHowson;
    cfg.timeout_secs = 1e-9;
    cfg.output_dir = Some(dir.path().to_path_buf());
    let r = run_experiment(&cfg).unwrap();
    assert_eq!((r.timeout, r.exit_code()), (2, 2));
    let csv = fs::read_to_string(dir.path().join(TRIALS_FILE)).unwrap();
    assert_eq!(csv.lines().filter(|l| l.contains(",timeout,")).count(), 2);
}

#[test]
fn output_root_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    std::env::set_var(OUTPUT_ROOT_ENV, dir.path());
    let mut cfg = ExperimentConfig::new(ExperimentKind::AntiConcentration, 2, 77);
    cfg.n = 6;
    let r = run_experiment(&cfg).unwrap();
    std::env::remove_var(OUTPUT_ROOT_ENV);
    assert_eq!(r.dir, dir.path().join("anti_concentration-seed77"));
    assert!(r.dir.join(SUMMARY_FILE).exists());
}

#[test]
fn replay_detects_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::new(ExperimentKind::Bilinear, 3, 2);
    cfg.n = 10;
    cfg.samples = Some(200);
    cfg.output_dir = Some(dir.path().join("run"));
    run_experiment(&cfg).unwrap();
    let trials = dir.path().join("run").join(TRIALS_FILE);
    let text = fs::read_to_string(&trials).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    lines[2] = lines[2].replacen(",ok,", ",failed,", 1);
    fs::write(&trials, lines.join("\n") + "\n").unwrap();
    let r = replay_experiment(&dir.path().join("run"), Some(2), None).unwrap();
    assert!(!r.identical);
    assert_eq!(r.first_difference, Some(3));
}

#[test]
fn subseeds_are_stable() {
    assert_eq!(derive_subseed(0, "Z0", 0), 0x019b_e7a8_ac15_b509);
}
