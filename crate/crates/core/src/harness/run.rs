use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::seq::index::sample;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::config::{ExperimentConfig, ExperimentKind};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::reduction::{sample_noise_matrix, NoiseSpec};
use crate::seed::{derive_subseed, rng_from_seed};
use crate::structure::{
    anti_concentration_estimate, bilinear_concentration_probe, equilibrium_geometry_experiment,
    halfspace_interval_density, EstimateMode, GeometryConfig, Proportion, Quantiles, TrialGeometry, TrialStatus,
};

/// Bumped whenever a column is added, removed, renamed, or changes meaning.
pub const SCHEMA_VERSION: u32 = 1;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const TRIALS_FILE: &str = "trials.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const TIMINGS_FILE: &str = "timings.csv";

/// Density of the uniform distribution on `[-1, 1]`.
const UNIFORM_DENSITY: f64 = 0.5;

type Columns = &'static [(&'static str, &'static str)];

const GEOMETRY_COLUMNS: Columns = &[
    ("index", "trial index"),
    ("subseed", "seed of the trial, derived from (master seed, \"trial\", index)"),
    ("status", "ok, failed or timeout"),
    ("method", "solver used"),
    ("n", "number of pure strategies per player"),
    ("pure_equilibria", "pure equilibria of the game"),
    ("equilibria_found", "equilibria returned by the solver"),
    ("support_x", "row support size of the first equilibrium"),
    ("support_y", "column support size of the first equilibrium"),
    ("l2_x", "l2 norm of the row strategy"),
    ("l2_y", "l2 norm of the column strategy"),
    ("max_regret", "larger of the two regrets of the equilibrium"),
    ("work", "pivots or support pairs examined"),
    ("defect", "regret of the decoded strategies in the source game (reduced instances)"),
    ("s_good", "good off-support rows per block, ';'-separated (reduced instances)"),
    ("t_good", "good off-support columns per block, ';'-separated (reduced instances)"),
    ("beta_x", "benchmark beta of the row strategy (reduced instances)"),
    ("beta_y", "benchmark beta of the column strategy (reduced instances)"),
    ("message", "failure description"),
];

const BILINEAR_COLUMNS: Columns = &[
    ("index", "trial index"),
    ("subseed", "seed of the Rademacher matrix and of the probe"),
    ("status", "ok or failed"),
    ("n", "matrix size"),
    ("samples", "sampled (x, y) pairs"),
    ("max_l2_ratio", "max |x'My| / (sqrt(ln n)(|x|_2 + |y|_2)) over l1-normalized pairs"),
    ("max_beta_ratio", "max |x'My| / (beta(x) + beta(y))"),
    ("beta_signed_sparse", "max beta ratio, signed sparse family"),
    ("beta_distribution", "max beta ratio, distribution family"),
    ("beta_one_hot", "max beta ratio, one-hot family"),
    ("beta_aligned_top_k", "max beta ratio, x aligned with the top entries of My"),
];

const HALFSPACE_COLUMNS: Columns = &[
    ("index", "trial index"),
    ("subseed", "seed of the point cloud and of the directions"),
    ("status", "ok or failed"),
    ("n", "number of points"),
    ("d", "dimension"),
    ("interval_len", "window length"),
    ("max_fraction", "largest fraction of projections in one window, over all directions"),
    ("degenerate", "some direction projected every point to one value"),
    ("best_split_min", "largest min(|S1|, |S2|) of a gap split over all directions"),
    ("predicted", "sqrt(2) * K * interval_len with K = 1/2"),
    ("slack", "max_fraction - predicted"),
    ("fitted_constant", "max(slack, 0) / sqrt(d / n)"),
];

const ANTI_COLUMNS: Columns = &[
    ("index", "trial index"),
    ("subseed", "seed of the distribution and of the sign vectors"),
    ("status", "ok or failed"),
    ("n", "length of x"),
    ("nonzeros", "support size of x"),
    ("beta", "benchmark beta of x"),
    ("threshold", "c * beta(x)"),
    ("exact", "probability computed by full enumeration"),
    ("successes", "sign vectors with <v, x> >= threshold"),
    ("sign_trials", "sign vectors counted"),
    ("probability", "estimated Pr[<v, x> >= threshold]"),
    ("wilson_low", "lower end of the 95% Wilson interval"),
    ("wilson_high", "upper end of the 95% Wilson interval"),
];

fn columns(kind: ExperimentKind) -> Columns {
    match kind {
        ExperimentKind::Geometry | ExperimentKind::Decoding => GEOMETRY_COLUMNS,
        ExperimentKind::Bilinear => BILINEAR_COLUMNS,
        ExperimentKind::Halfspace => HALFSPACE_COLUMNS,
        ExperimentKind::AntiConcentration => ANTI_COLUMNS,
    }
}

struct TrialRow {
    status: TrialStatus,
    cells: Vec<String>,
    elapsed: Duration,
}

fn num(v: f64) -> String {
    format!("{v:?}")
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(String::new, |v| v.to_string())
}

fn optf(v: Option<f64>) -> String {
    v.map_or_else(String::new, num)
}

fn join(v: &[usize]) -> String {
    v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(";")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub dir: PathBuf,
    pub trials: u64,
    pub ok: u64,
    pub failed: u64,
    pub timeout: u64,
}

impl RunReport {
    /// 0 when every trial is ok, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.failed + self.timeout == 0 {
            0
        } else {
            2
        }
    }
}

fn geometry_rows(cfg: &ExperimentConfig) -> Result<(Vec<TrialRow>, Value)> {
    let generator = cfg.effective_generator().ok_or_else(|| Error::Config("missing generator".into()))?;
    let n = generator.size(cfg.n);
    let gc = GeometryConfig {
        generator,
        n: cfg.n,
        trials: cfg.trials,
        seed: cfg.seed,
        solver: cfg.solver,
        c: cfg.c(),
        partition: Some(cfg.partition(n)),
        timeout_secs: Some(cfg.timeout_secs),
        support_tol: cfg.overrides.tau,
    };
    let stats = equilibrium_geometry_experiment(&gc)?;
    let rows = stats.trials.iter().map(geometry_row).collect();
    let summary = json!({
        "n": n,
        "generator": gc.generator,
        "partition": gc.partition,
        "c": gc.c,
        "pure_equilibrium": stats.pure,
        "support_fraction": stats.support_fraction,
        "l2_norm": stats.l2_norm,
        "max_regret": stats.max_regret,
        "defect": stats.defect,
        "good_fraction": stats.good_fraction,
    });
    Ok((rows, summary))
}

fn geometry_row(t: &TrialGeometry) -> TrialRow {
    let g = t.goodness.as_ref();
    TrialRow {
        status: t.status,
        cells: vec![
            t.index.to_string(),
            t.subseed.to_string(),
            t.status.as_str().into(),
            serde_json::to_value(t.method).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
            t.n.to_string(),
            t.pure_equilibria.to_string(),
            t.equilibria_found.to_string(),
            opt(t.support_sizes.map(|s| s.0)),
            opt(t.support_sizes.map(|s| s.1)),
            optf(t.l2_norms.map(|s| s.0)),
            optf(t.l2_norms.map(|s| s.1)),
            optf(t.max_regret),
            opt(t.work),
            optf(t.defect),
            g.map(|g| join(&g.s_good)).unwrap_or_default(),
            g.map(|g| join(&g.t_good)).unwrap_or_default(),
            optf(g.map(|g| g.beta_x)),
            optf(g.map(|g| g.beta_y)),
            t.message.clone().unwrap_or_default(),
        ],
        elapsed: t.elapsed,
    }
}

/// Runs `f(index)` for every trial on the current pool, in index order.
fn per_trial<T: Send>(cfg: &ExperimentConfig, f: impl Fn(u64, u64) -> T + Sync + Send) -> Vec<(T, Duration)> {
    (0..cfg.trials)
        .into_par_iter()
        .map(|i| {
            let start = Instant::now();
            let out = f(i, derive_subseed(cfg.seed, "trial", i));
            (out, start.elapsed())
        })
        .collect()
}

fn failed_row(width: usize, index: u64, subseed: u64, message: String, elapsed: Duration) -> TrialRow {
    log::warn!("trial {index} failed: {message}");
    let mut cells = vec![String::new(); width];
    cells[0] = index.to_string();
    cells[1] = subseed.to_string();
    cells[2] = "failed".into();
    TrialRow { status: TrialStatus::Failed, cells, elapsed }
}

fn bilinear_rows(cfg: &ExperimentConfig) -> Result<(Vec<TrialRow>, Value)> {
    let n = cfg.n;
    let params = cfg.partition(n);
    let samples = cfg.samples();
    let results = per_trial(cfg, |_, subseed| {
        let m = sample_noise_matrix(&NoiseSpec::rademacher(1.0), n, derive_subseed(subseed, "M", 0))?;
        bilinear_concentration_probe(&m, samples, derive_subseed(subseed, "probe", 0), &params)
    });
    let mut rows = Vec::new();
    let (mut l2, mut beta) = (Vec::new(), Vec::new());
    for (i, (res, elapsed)) in results.into_iter().enumerate() {
        let subseed = derive_subseed(cfg.seed, "trial", i as u64);
        match res {
            Ok(r) => {
                l2.push(r.max_l2_ratio);
                beta.push(r.max_beta_ratio);
                let mut cells = vec![
                    i.to_string(),
                    subseed.to_string(),
                    "ok".into(),
                    n.to_string(),
                    samples.to_string(),
                    num(r.max_l2_ratio),
                    num(r.max_beta_ratio),
                ];
                cells.extend(r.families.iter().map(|f| num(f.max_beta_ratio)));
                rows.push(TrialRow { status: TrialStatus::Ok, cells, elapsed });
            }
            Err(e) => rows.push(failed_row(BILINEAR_COLUMNS.len(), i as u64, subseed, e.to_string(), elapsed)),
        }
    }
    let max = |v: &[f64]| v.iter().copied().reduce(f64::max);
    let summary = json!({
        "n": n,
        "samples_per_trial": samples,
        "partition": params,
        "max_l2_ratio": Quantiles::of(&l2),
        "max_beta_ratio": Quantiles::of(&beta),
        "fitted_constants": { "l2_scale": max(&l2), "beta_scale": max(&beta) },
    });
    Ok((rows, summary))
}

fn halfspace_rows(cfg: &ExperimentConfig) -> Result<(Vec<TrialRow>, Value)> {
    let (n, d) = (cfg.n, cfg.dimension());
    let len = cfg.interval_len();
    let probes = cfg.samples() as usize;
    let results = per_trial(cfg, |_, subseed| {
        let mut rng = rng_from_seed(derive_subseed(subseed, "points", 0));
        let rows = Matrix::from_fn(n, d, |_, _| rng.random_range(-1.0..=1.0));
        halfspace_interval_density(&rows, probes, len, derive_subseed(subseed, "directions", 0), Some(UNIFORM_DENSITY))
    });
    let mut rows = Vec::new();
    let (mut frac, mut fitted) = (Vec::new(), Vec::new());
    for (i, (res, elapsed)) in results.into_iter().enumerate() {
        let subseed = derive_subseed(cfg.seed, "trial", i as u64);
        match res {
            Ok(r) => {
                let dc = r.density.expect("density bound supplied");
                frac.push(r.max_fraction);
                fitted.push(dc.fitted_constant);
                let split = r.probes.iter().filter_map(|p| p.split.as_ref().map(|s| s.min_size())).max();
                rows.push(TrialRow {
                    status: TrialStatus::Ok,
                    cells: vec![
                        i.to_string(),
                        subseed.to_string(),
                        "ok".into(),
                        n.to_string(),
                        d.to_string(),
                        num(len),
                        num(r.max_fraction),
                        r.degenerate.to_string(),
                        opt(split),
                        num(dc.predicted),
                        num(dc.slack),
                        num(dc.fitted_constant),
                    ],
                    elapsed,
                });
            }
            Err(e) => rows.push(failed_row(HALFSPACE_COLUMNS.len(), i as u64, subseed, e.to_string(), elapsed)),
        }
    }
    let summary = json!({
        "n": n,
        "d": d,
        "interval_len": len,
        "directions_per_trial": probes,
        "density_bound": UNIFORM_DENSITY,
        "max_fraction": Quantiles::of(&frac),
        "fitted_constants": { "slack_scale": fitted.iter().copied().reduce(f64::max) },
    });
    Ok((rows, summary))
}

/// Random distribution with a log-uniform number of nonzeros.
fn random_distribution(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = rng_from_seed(seed);
    let k = ((n as f64).powf(rng.random::<f64>()).round() as usize).clamp(1, n);
    let mut x = vec![0.0; n];
    for j in sample(&mut rng, n, k) {
        x[j] = rng.random_range(f64::EPSILON..1.0);
    }
    let s: f64 = x.iter().sum();
    x.iter_mut().for_each(|v| *v /= s);
    x
}

fn anti_rows(cfg: &ExperimentConfig) -> Result<(Vec<TrialRow>, Value)> {
    let n = cfg.n;
    let params = cfg.partition(n);
    let c = cfg.c();
    let samples = cfg.samples();
    let results = per_trial(cfg, |_, subseed| {
        let x = random_distribution(n, derive_subseed(subseed, "x", 0));
        let nz = x.iter().filter(|v| **v != 0.0).count();
        anti_concentration_estimate(&x, &params, c, samples, derive_subseed(subseed, "signs", 0), EstimateMode::Auto)
            .map(|e| (e, nz))
    });
    let mut rows = Vec::new();
    let mut probs = Vec::new();
    for (i, (res, elapsed)) in results.into_iter().enumerate() {
        let subseed = derive_subseed(cfg.seed, "trial", i as u64);
        match res {
            Ok((e, nz)) => {
                probs.push(e.probability);
                let p: Proportion = e.proportion;
                rows.push(TrialRow {
                    status: TrialStatus::Ok,
                    cells: vec![
                        i.to_string(),
                        subseed.to_string(),
                        "ok".into(),
                        n.to_string(),
                        nz.to_string(),
                        num(e.beta),
                        num(e.threshold),
                        e.exact.to_string(),
                        p.successes.to_string(),
                        p.trials.to_string(),
                        num(e.probability),
                        num(p.wilson_low),
                        num(p.wilson_high),
                    ],
                    elapsed,
                });
            }
            Err(e) => rows.push(failed_row(ANTI_COLUMNS.len(), i as u64, subseed, e.to_string(), elapsed)),
        }
    }
    let summary = json!({
        "n": n,
        "c": c,
        "partition": params,
        "sign_vectors_per_trial": samples,
        "probability": Quantiles::of(&probs),
        "fitted_constants": { "min_probability": probs.iter().copied().reduce(f64::min) },
    });
    Ok((rows, summary))
}

fn in_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
            Ok(pool.install(f))
        }
        None => Ok(f()),
    }
}

fn write_csv(path: &Path, header: impl IntoIterator<Item = String>, rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Io(e.into()))?;
    w.write_record(header).map_err(|e| Error::Io(e.into()))?;
    for r in rows {
        w.write_record(r).map_err(|e| Error::Io(e.into()))?;
    }
    w.flush()?;
    Ok(())
}

/// Runs the experiment and writes `manifest.json`, `trials.csv`,
/// `summary.json` and `timings.csv` into the resolved output directory.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunReport> {
    cfg.validate()?;
    let dir = cfg.resolve_output_dir();
    fs::create_dir_all(&dir)?;
    let (rows, summary) = in_pool(cfg.workers, || match cfg.kind {
        ExperimentKind::Geometry | ExperimentKind::Decoding => geometry_rows(cfg),
        ExperimentKind::Bilinear => bilinear_rows(cfg),
        ExperimentKind::Halfspace => halfspace_rows(cfg),
        ExperimentKind::AntiConcentration => anti_rows(cfg),
    })??;
    let cols = columns(cfg.kind);
    let count = |s| rows.iter().filter(|r| r.status == s).count() as u64;
    let report = RunReport {
        dir: dir.clone(),
        trials: rows.len() as u64,
        ok: count(TrialStatus::Ok),
        failed: count(TrialStatus::Failed),
        timeout: count(TrialStatus::Timeout),
    };

    let manifest = json!({
        "schema_version": SCHEMA_VERSION,
        "code_version": env!("CARGO_PKG_VERSION"),
        "kind": cfg.kind,
        "log_base": "natural",
        "config": cfg,
        "files": { "trials": TRIALS_FILE, "summary": SUMMARY_FILE, "timings": TIMINGS_FILE },
        "columns": cols.iter().map(|(name, doc)| json!({ "name": name, "description": doc })).collect::<Vec<_>>(),
        "timing_columns": [
            { "name": "index", "description": "trial index" },
            { "name": "elapsed_ms", "description": "wall-clock time of the trial in milliseconds" },
        ],
    });
    fs::write(dir.join(MANIFEST_FILE), serde_json::to_string_pretty(&manifest)? + "\n")?;
    write_csv(
        &dir.join(TRIALS_FILE),
        cols.iter().map(|c| c.0.to_string()),
        rows.iter().map(|r| r.cells.clone()),
    )?;
    write_csv(
        &dir.join(TIMINGS_FILE),
        ["index".to_string(), "elapsed_ms".to_string()],
        rows.iter().enumerate().map(|(i, r)| vec![i.to_string(), num(r.elapsed.as_secs_f64() * 1e3)]),
    )?;
    let full = json!({
        "schema_version": SCHEMA_VERSION,
        "kind": cfg.kind,
        "trials": report.trials,
        "status": { "ok": report.ok, "failed": report.failed, "timeout": report.timeout },
        "results": summary,
    });
    fs::write(dir.join(SUMMARY_FILE), serde_json::to_string_pretty(&full)? + "\n")?;
    log::info!("wrote {} trials to {}", report.trials, dir.display());
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayReport {
    pub original: PathBuf,
    pub replay: PathBuf,
    pub identical: bool,
    /// 1-based line of the first difference in `trials.csv`.
    pub first_difference: Option<usize>,
    pub run: RunReport,
}

/// Reads the configuration echoed in `dir/manifest.json`, re-runs it into
/// `out` (default `dir/replay`), optionally with another worker count, and
/// compares the two `trials.csv` byte for byte.
pub fn replay_experiment(dir: &Path, workers: Option<usize>, out: Option<&Path>) -> Result<ReplayReport> {
    let manifest: Value = serde_json::from_str(&fs::read_to_string(dir.join(MANIFEST_FILE))?)?;
    let version = manifest.get("schema_version").and_then(Value::as_u64);
    if version != Some(u64::from(SCHEMA_VERSION)) {
        return Err(Error::Config(format!("schema version {version:?} differs from {SCHEMA_VERSION}")));
    }
    let mut cfg: ExperimentConfig = serde_json::from_value(manifest.get("config").cloned().unwrap_or(Value::Null))
        .map_err(|e| Error::Config(format!("manifest config: {e}")))?;
    let replay = out.map(Path::to_path_buf).unwrap_or_else(|| dir.join("replay"));
    cfg.output_dir = Some(replay.clone());
    if workers.is_some() {
        cfg.workers = workers;
    }
    let run = run_experiment(&cfg)?;
    let a = fs::read(dir.join(TRIALS_FILE))?;
    let b = fs::read(replay.join(TRIALS_FILE))?;
    let first_difference = (a != b).then(|| {
        let (la, lb): (Vec<&[u8]>, Vec<&[u8]>) = (a.split(|c| *c == b'\n').collect(), b.split(|c| *c == b'\n').collect());
        (0..la.len().max(lb.len())).find(|&i| la.get(i) != lb.get(i)).map_or(1, |i| i + 1)
    });
    Ok(ReplayReport { original: dir.to_path_buf(), replay, identical: first_difference.is_none(), first_difference, run })
}
