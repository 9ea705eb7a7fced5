//! Experiment configuration, deterministic execution, and the on-disk
//! layout of a run.
//!
//! A run directory holds `manifest.json` (schema version, code version, the
//! configuration, and a description of every CSV column), `trials.csv` (one
//! row per trial in index order), `summary.json` (aggregates), and
//! `timings.csv` (wall-clock time per trial). Timings are kept out of
//! `trials.csv` so that re-running a configuration reproduces that file
//! byte for byte.

mod config;
mod run;

pub use crate::seed::derive_subseed;
pub use config::{ExperimentConfig, ExperimentKind, Overrides, DEFAULT_TIMEOUT_SECS, OUTPUT_ROOT_ENV};
pub use run::{
    replay_experiment, run_experiment, ReplayReport, RunReport, MANIFEST_FILE, SCHEMA_VERSION, SUMMARY_FILE,
    TIMINGS_FILE, TRIALS_FILE,
};
