use std::fs;
use std::io::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use rand::Rng as _;
use serde_json::{json, Value};

use smoothed_nash::harness::{replay_experiment, run_experiment, ExperimentConfig, ExperimentKind, RunReport};
use smoothed_nash::reduction::{build_with, decoding_defect, load_instance, save_instance, NoiseSpec, ReductionParams};
use smoothed_nash::seed::rng_from_seed;
use smoothed_nash::solvers::{
    lemke_howson_report, support_enumeration_with, zero_sum_report, LemkeHowsonOptions, SupportEnumOptions,
};
use smoothed_nash::structure::{
    binom_tail_sweep, entropy_binom_sweep, erdos_dominance_check, goodness, robust_partition, PartitionParams,
};
use smoothed_nash::BimatrixGame;

use crate::{
    AnalyzeArgs, Analysis, Command, ExperimentCommand, Method, ProbeArgs, ProbeKind, ReduceArgs, SolveArgs,
    VerifyArgs, VerifyArgsKind,
};

pub fn dispatch(cmd: Command) -> Result<u8> {
    match cmd {
        Command::Solve(a) => solve(a),
        Command::Reduce(a) => reduce(a),
        Command::Analyze(a) => analyze(a),
        Command::Probe(a) => probe(a),
        Command::VerifyBounds(a) => verify(a),
        Command::Experiment(ExperimentCommand::Run { config, workers, out }) => {
            let mut cfg = ExperimentConfig::load(&config).with_context(|| format!("loading {}", config.display()))?;
            if workers.is_some() {
                cfg.workers = workers;
            }
            if out.is_some() {
                cfg.output_dir = out;
            }
            finish_run(run_experiment(&cfg)?)
        }
        Command::Experiment(ExperimentCommand::Replay { dir, workers, out }) => {
            let r = replay_experiment(&dir, workers, out.as_deref())?;
            print_json(&json!(r))?;
            Ok(if r.identical { 0 } else { 2 })
        }
    }
}

fn print_json(v: &Value) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{}", serde_json::to_string_pretty(v)?) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

fn read_game(path: &Path) -> Result<BimatrixGame> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    BimatrixGame::from_text(&text).with_context(|| format!("parsing {}", path.display()))
}

fn finish_run(r: RunReport) -> Result<u8> {
    print_json(&json!(r))?;
    Ok(if r.exit_code() == 0 { 0 } else { 2 })
}

fn solve(a: SolveArgs) -> Result<u8> {
    let game = read_game(&a.game)?;
    let report = match a.method {
        Method::Lp => {
            let neg = game.payoff_a().neg();
            if game.payoff_b() != &neg {
                log::warn!("B is not -A; solving the zero-sum game with row payoff A");
            }
            zero_sum_report(&game)?
        }
        Method::Lh => lemke_howson_report(&game, a.label, &LemkeHowsonOptions::default())?,
        Method::SupportEnum => {
            let k = a.max_support.unwrap_or(game.rows().min(game.cols()));
            support_enumeration_with(&game, k, &SupportEnumOptions { include_unequal: a.include_unequal })?
        }
    };
    print_json(&json!(report))?;
    Ok(0)
}

fn reduce(a: ReduceArgs) -> Result<u8> {
    let source = read_game(&a.source)?;
    if source.rows() != a.blocks || source.cols() != a.blocks {
        bail!("source is {}×{} but --blocks is {}", source.rows(), source.cols(), a.blocks);
    }
    let noise: NoiseSpec = a.noise.parse()?;
    let params = ReductionParams {
        general_x: a.general_x,
        scale_third: a.scale_third,
        signal_scale: a.signal_scale,
        ..ReductionParams::new(a.block_len, noise, a.seed)
    };
    let inst = build_with(&source, &params)?;
    let manifest = save_instance(&inst, &a.out, a.persist_noise)?;
    print_json(&json!({
        "out": a.out,
        "n": inst.block_map.n,
        "gadget_residual": inst.gadget_residual()?,
        "manifest": manifest,
    }))?;
    Ok(0)
}

fn analyze(a: AnalyzeArgs) -> Result<u8> {
    let inst = load_instance(&a.input).with_context(|| format!("loading instance {}", a.input.display()))?;
    let n = inst.block_map.n;
    let base = PartitionParams::desk_default(n);
    let params = PartitionParams::new(a.d.unwrap_or(base.d), a.l.unwrap_or(base.l))?;
    let report = lemke_howson_report(&inst.reduced, a.label, &LemkeHowsonOptions::default())?;
    let eq = report.equilibria.first().context("solver returned no equilibrium")?;
    let out = match a.what {
        Analysis::Partition => json!({
            "x": robust_partition(eq.x.weights(), &params)?,
            "y": robust_partition(eq.y.weights(), &params)?,
        }),
        Analysis::Beta => json!({
            "params": params,
            "log_base": "natural",
            "beta_x": robust_partition(eq.x.weights(), &params)?.beta,
            "beta_y": robust_partition(eq.y.weights(), &params)?.beta,
        }),
        Analysis::Geometry => json!({
            "n": n,
            "pivots": report.work,
            "support_sizes": eq.support_sizes,
            "l2_norms": eq.l2_norms,
            "regrets": [eq.regret_row, eq.regret_col],
            "decoding_defect": decoding_defect(&inst, &eq.x, &eq.y)?,
        }),
        Analysis::Goodness => json!({
            "c": a.c,
            "params": params,
            "goodness": goodness(&inst, eq, a.c, &params, eq.x.tolerance())?,
        }),
    };
    print_json(&out)?;
    Ok(0)
}

fn probe(a: ProbeArgs) -> Result<u8> {
    let kind = match a.kind {
        ProbeKind::Bilinear => ExperimentKind::Bilinear,
        ProbeKind::Halfspace => ExperimentKind::Halfspace,
        ProbeKind::Anticoncentration => ExperimentKind::AntiConcentration,
    };
    let mut cfg = ExperimentConfig::new(kind, a.trials, a.seed);
    cfg.n = a.n;
    cfg.samples = a.samples;
    cfg.dimension = a.dimension;
    cfg.interval_len = a.interval_len;
    cfg.workers = a.workers;
    cfg.output_dir = a.out;
    cfg.overrides.c = a.c;
    cfg.overrides.d = a.d;
    cfg.overrides.l = a.l;
    finish_run(run_experiment(&cfg)?)
}

fn verify(a: VerifyArgs) -> Result<u8> {
    let (holds, report) = match a.kind {
        VerifyArgsKind::Erdos { instances, max_n, seed } => {
            if max_n == 0 {
                bail!("--max-n must be at least 1");
            }
            let mut rng = rng_from_seed(seed);
            let mut failures = Vec::new();
            for _ in 0..instances {
                let n = rng.random_range(1..=max_n);
                let coeffs: Vec<f64> = (0..n).map(|_| rng.random_range(1.0..4.0)).collect();
                let k = rng.random_range(1..=n as i64 + 1);
                let r = erdos_dominance_check(&coeffs, k)?;
                if !r.holds {
                    failures.push(json!({ "a": coeffs, "k": k, "report": r }));
                }
            }
            (failures.is_empty(), json!({ "instances": instances, "max_n": max_n, "seed": seed, "failures": failures }))
        }
        VerifyArgsKind::BinomTail { n_min, n_max } => {
            let r = binom_tail_sweep(n_min, n_max);
            (r.holds(), json!({ "n_min": n_min, "n_max": n_max, "report": r }))
        }
        VerifyArgsKind::Entropy { n_max } => {
            let (evaluated, failures) = entropy_binom_sweep(n_max);
            (failures.is_empty(), json!({ "n_max": n_max, "evaluated": evaluated, "failures": failures }))
        }
    };
    print_json(&json!({ "holds": holds, "details": report }))?;
    Ok(if holds { 0 } else { 2 })
}
