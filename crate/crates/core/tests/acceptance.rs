//! Acceptance criteria, one line of output per criterion. Exits nonzero if
//! any criterion fails.

use std::time::{Duration, Instant};

use rand::seq::index::sample;
use rand::Rng as _;

use smoothed_nash::harness::{replay_experiment, run_experiment, ExperimentConfig, ExperimentKind};
use smoothed_nash::matrix::Matrix;
use smoothed_nash::reduction::{build_with, sample_noise_matrix, NoiseSpec, ReductionInstance, ReductionParams};
use smoothed_nash::seed::{derive_subseed, rng_from_seed};
use smoothed_nash::solvers::{pure_equilibria, solve_zero_sum};
use smoothed_nash::structure::*;
use smoothed_nash::BimatrixGame;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn within_budget(o: Outcome, elapsed: Duration, budget: Option<Duration>) -> Outcome {
    match budget {
        Some(b) if elapsed > b => outcome(false, format!("{}; over the {:?} budget", o.detail, b)),
        _ => o,
    }
}

fn median_of(v: &[f64]) -> f64 {
    median(v).expect("non-empty")
}

/// Saddle-point test written out directly: (i, j) is the row minimum and the
/// column maximum of the row player's payoff.
fn has_saddle(c: &[[f64; 2]; 2]) -> bool {
    (0..2).any(|i| (0..2).any(|j| c[i][j] <= c[i][1 - j] && c[i][j] >= c[1 - i][j]))
}

fn c1_zero_sum() -> Outcome {
    let pennies = Matrix::from_rows(&[[1.0, -1.0], [-1.0, 1.0]]).unwrap();
    let s = solve_zero_sum(&pennies).unwrap();
    let uniform_ok = s.x.weights().iter().chain(s.y.weights()).all(|w| (w - 0.5).abs() <= 1e-9);
    let pennies_ok = s.value.abs() <= 1e-9 && uniform_ok;
    let mut worst_gap: f64 = 0.0;
    for t in 0..500u64 {
        let c = sample_noise_matrix(&NoiseSpec::uniform(1.0), 32, derive_subseed(1, "lp", t)).unwrap();
        let s = solve_zero_sum(&c).unwrap();
        // Best response values computed from the matrix directly.
        let cy = c.mul_vec(s.y.weights());
        let xc = c.vec_mul(s.x.weights());
        let upper = cy.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lower = xc.iter().copied().fold(f64::INFINITY, f64::min);
        worst_gap = worst_gap.max(upper - lower);
    }
    outcome(
        pennies_ok && worst_gap <= 1e-8,
        format!("pennies value {:.1e}, uniform {uniform_ok}; worst duality gap {worst_gap:.2e} over 500 games", s.value),
    )
}

fn c2_iid_pure_rate() -> Outcome {
    let cfg = GeometryConfig::new(GameGenerator::IidUniform, 32, 2000, 2);
    let stats = equilibrium_geometry_experiment(&cfg).unwrap();
    let p = stats.pure.estimate.unwrap_or(f64::NAN);
    outcome(
        stats.ok == 2000 && (0.58..=0.68).contains(&p),
        format!("pure-equilibrium frequency {p:.4} (1 - 1/e = {:.4}), {} ok trials", 1.0 - (-1f64).exp(), stats.ok),
    )
}

fn c3_zero_sum_contrast() -> Outcome {
    let mut hits = 0;
    for t in 0..2000u64 {
        let a = sample_noise_matrix(&NoiseSpec::rademacher(1.0), 32, derive_subseed(3, "rad32", t)).unwrap();
        if !pure_equilibria(&BimatrixGame::zero_sum(a).unwrap()).is_empty() {
            hits += 1;
        }
    }
    let freq = f64::from(hits) / 2000.0;
    let mut exact_hits = 0;
    for mask in 0..16u32 {
        let e = |k: u32| if mask >> k & 1 == 1 { 1.0 } else { -1.0 };
        if has_saddle(&[[e(0), e(1)], [e(2), e(3)]]) {
            exact_hits += 1;
        }
    }
    let exact = f64::from(exact_hits) / 16.0;
    let library_exact = exact_rademacher_2x2_pure_probability();
    let cfg = GeometryConfig::new(GameGenerator::ZeroSumRademacher, 2, 2000, 3);
    let mc = equilibrium_geometry_experiment(&cfg).unwrap().pure;
    outcome(
        freq <= 0.01 && exact == library_exact && mc.contains(exact),
        format!(
            "n=32 frequency {freq:.4}; n=2 exact {exact} vs Monte Carlo {:.4} [{:.4}, {:.4}]",
            mc.estimate.unwrap_or(f64::NAN),
            mc.wilson_low,
            mc.wilson_high
        ),
    )
}

fn c4_geometry_trends() -> Outcome {
    let run = |n| {
        let s = equilibrium_geometry_experiment(&GeometryConfig::new(GameGenerator::ZeroSumUniform, n, 200, 4)).unwrap();
        assert_eq!(s.ok, 200);
        let sf: Vec<f64> = s.trials.iter().filter_map(|t| t.support_fraction()).collect();
        let l2: Vec<f64> = s.trials.iter().filter_map(|t| t.mean_l2()).collect();
        (median_of(&sf), median_of(&l2))
    };
    let (sf16, l16) = run(16);
    let (sf64, l64) = run(64);
    outcome(
        sf64 >= sf16 && l64 <= l16,
        format!("median support fraction {sf16:.4} -> {sf64:.4}; median l2 {l16:.4} -> {l64:.4}"),
    )
}

fn reduced(ell: usize) -> GameGenerator {
    GameGenerator::ReducedInstance(ReducedGenerator {
        b: 4,
        ell,
        noise: NoiseSpec::uniform(0.1),
        general_x: false,
        scale_third: false,
        signal_scale: 1.0,
        source: None,
    })
}

fn c5_decoding_trend() -> Outcome {
    let mut medians = Vec::new();
    let mut failures = 0;
    for ell in [16usize, 64, 256] {
        let mut cfg = GeometryConfig::new(reduced(ell), 0, 50, 5);
        cfg.solver = SolverChoice::LemkeHowson;
        let s = equilibrium_geometry_experiment(&cfg).unwrap();
        failures += s.failed + s.timeout;
        let d: Vec<f64> = s.trials.iter().filter_map(|t| t.defect).collect();
        medians.push(median_of(&d));
    }
    let monotone = medians.windows(2).all(|w| w[1] <= w[0]);
    outcome(
        failures == 0 && monotone && medians[2] <= 0.5 * medians[0],
        format!(
            "median defect at l = 16, 64, 256: {:.4}, {:.4}, {:.4}; solver failures {failures}",
            medians[0], medians[1], medians[2]
        ),
    )
}

fn c6_combinatorics() -> Outcome {
    let mut rng = rng_from_seed(6);
    let mut erdos_fail = 0;
    for _ in 0..1000 {
        let n = rng.random_range(1..=14usize);
        let a: Vec<f64> = (0..n).map(|_| if rng.random_bool(0.3) { 1.0 } else { rng.random_range(1.0..4.0) }).collect();
        let k = rng.random_range(1..=n as i64 + 1);
        if !erdos_dominance_check(&a, k).unwrap().holds {
            erdos_fail += 1;
        }
    }
    let (entropy_count, entropy_fail) = entropy_binom_sweep(2000);
    let tail = binom_tail_sweep(30, 2000);
    let small = binom_tail_sweep(1, 29);
    let small_n: Vec<u64> = {
        let mut v: Vec<u64> = small.failures.iter().map(|c| c.n).collect();
        v.dedup();
        v
    };
    outcome(
        erdos_fail == 0 && entropy_fail.is_empty() && tail.holds(),
        format!(
            "erdos failures {erdos_fail}/1000; entropy failures {}/{entropy_count}; tail failures {}/{} for n in 30..=2000 \
             (below 30: {} failing pairs at n = {small_n:?})",
            entropy_fail.len(),
            tail.failures.len(),
            tail.evaluated,
            small.failures.len()
        ),
    )
}

fn c7_sparse_anticoncentration() -> Outcome {
    let l = 3;
    let bound = 2f64.powi(-(2 * l as i32 + 1));
    let mut rng = rng_from_seed(7);
    let mut worst: f64 = 1.0;
    let mut mismatches = 0;
    for _ in 0..50 {
        let n = rng.random_range(2 * l..=64);
        let k = rng.random_range(1..=2 * l);
        let mut x = vec![0.0; n];
        for j in sample(&mut rng, n, k) {
            x[j] = rng.random_range(0.01..1.0);
        }
        let s: f64 = x.iter().sum();
        x.iter_mut().for_each(|v| *v /= s);
        let p = exact_sign_tail(&x, 0.5).unwrap().estimate.unwrap();
        // Independent count over sign patterns of the nonzero coordinates.
        let nz: Vec<f64> = x.iter().copied().filter(|v| *v != 0.0).collect();
        let hits = (0..1u32 << nz.len())
            .filter(|m| {
                let sum: f64 = nz.iter().enumerate().map(|(j, v)| if m >> j & 1 == 1 { *v } else { -*v }).sum();
                sum >= 0.5 - 1e-12
            })
            .count();
        if (hits as f64 / f64::from(1u32 << nz.len()) - p).abs() > 0.0 {
            mismatches += 1;
        }
        worst = worst.min(p);
    }
    outcome(
        worst >= bound && mismatches == 0,
        format!("smallest exact probability {worst:.5} vs bound {bound:.5}; oracle mismatches {mismatches}"),
    )
}

fn c8_bilinear_scale() -> Outcome {
    let run = |n: usize| {
        let m = sample_noise_matrix(&NoiseSpec::rademacher(1.0), n, derive_subseed(8, "M", n as u64)).unwrap();
        bilinear_concentration_probe(&m, 100_000, derive_subseed(8, "probe", n as u64), &PartitionParams::desk_default(n))
            .unwrap()
    };
    let small = run(64);
    let large = run(256);
    outcome(
        large.max_beta_ratio <= 2.0 * small.max_beta_ratio,
        format!(
            "max beta ratio {:.4} at n=64, {:.4} at n=256; max l2 ratio {:.4}, {:.4}",
            small.max_beta_ratio, large.max_beta_ratio, small.max_l2_ratio, large.max_l2_ratio
        ),
    )
}

/// `A + B − (P+Q)⊗J − A_ε − B_ε`, scaled back, computed entry by entry.
fn residual(inst: &ReductionInstance) -> f64 {
    let n = inst.block_map.n;
    let ell = inst.block_map.ell;
    let scale = if inst.params.scale_third { 1.0 / 3.0 } else { 1.0 };
    let s = inst.params.signal_scale;
    let (a, b) = (inst.reduced.payoff_a(), inst.reduced.payoff_b());
    let (p, q) = (inst.source.payoff_a(), inst.source.payoff_b());
    let g = &inst.gadgets;
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let signal = s * (p[(i / ell, j / ell)] + q[(i / ell, j / ell)]);
            let r = a[(i, j)] + b[(i, j)] - scale * (signal + g.a_eps[(i, j)] + g.b_eps[(i, j)]);
            worst = worst.max(r.abs());
        }
    }
    worst
}

fn c9_gadget_identity() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut built = 0;
    for ell in [16usize, 64, 256] {
        for t in 0..50 {
            let subseed = derive_subseed(5, "trial", t);
            if let TrialGame::Reduced(inst) = generate_game(&reduced(ell), 0, subseed).unwrap() {
                worst = worst.max(residual(&inst)).max(inst.gadget_residual().unwrap());
                built += 1;
            }
        }
    }
    for t in 0..40u64 {
        let p = sample_noise_matrix(&NoiseSpec::uniform(1.0), 3, derive_subseed(9, "P", t)).unwrap();
        let q = sample_noise_matrix(&NoiseSpec::uniform(1.0), 3, derive_subseed(9, "Q", t)).unwrap();
        let noise = if t % 2 == 0 { NoiseSpec::rademacher(0.2) } else { NoiseSpec::uniform(0.3) };
        let params = ReductionParams {
            general_x: t % 4 < 2,
            scale_third: t % 3 == 0,
            signal_scale: 0.5 + (t % 5) as f64 * 0.25,
            ..ReductionParams::new(8, noise, t)
        };
        let inst = build_with(&BimatrixGame::new(p, q).unwrap(), &params).unwrap();
        worst = worst.max(residual(&inst)).max(inst.gadget_residual().unwrap());
        built += 1;
    }
    outcome(worst <= 1e-12, format!("max residual {worst:.2e} over {built} instances"))
}

fn c10_replay() -> Outcome {
    let root = std::env::temp_dir().join(format!("smoothnash-acceptance-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&root);
    let mut details = Vec::new();
    let mut pass = true;
    let mut configs = Vec::new();
    let mut decoding = ExperimentConfig::new(ExperimentKind::Decoding, 12, 10);
    decoding.overrides.b = Some(3);
    decoding.overrides.ell = Some(6);
    configs.push(decoding);
    let mut geometry = ExperimentConfig::new(ExperimentKind::Geometry, 30, 11);
    geometry.n = 8;
    geometry.generator = Some(GameGenerator::IidUniform);
    configs.push(geometry);
    let mut bilinear = ExperimentConfig::new(ExperimentKind::Bilinear, 6, 12);
    bilinear.n = 16;
    bilinear.samples = Some(500);
    configs.push(bilinear);
    for (i, mut cfg) in configs.into_iter().enumerate() {
        cfg.workers = Some(1);
        cfg.output_dir = Some(root.join(format!("run{i}")));
        run_experiment(&cfg).unwrap();
        let r = replay_experiment(cfg.output_dir.as_ref().unwrap(), Some(4), None).unwrap();
        pass &= r.identical;
        details.push(format!("{} {}", cfg.kind.as_str(), if r.identical { "identical" } else { "differs" }));
    }
    let _ = std::fs::remove_dir_all(&root);
    outcome(pass, format!("1 worker vs 4 workers: {}", details.join(", ")))
}

type Criterion = (&'static str, fn() -> Outcome, Option<u64>);

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("zero-sum LP solver", c1_zero_sum, Some(10)),
        ("pure-equilibrium rate, i.i.d. games", c2_iid_pure_rate, Some(60)),
        ("pure equilibria in zero-sum games", c3_zero_sum_contrast, None),
        ("support and l2 trends", c4_geometry_trends, Some(120)),
        ("decoding defect trend", c5_decoding_trend, Some(600)),
        ("exact combinatorial bounds", c6_combinatorics, Some(120)),
        ("sparse anti-concentration", c7_sparse_anticoncentration, Some(60)),
        ("bilinear scale stability", c8_bilinear_scale, Some(180)),
        ("gadget identity", c9_gadget_identity, None),
        ("replay determinism", c10_replay, None),
    ];
    let only: Option<usize> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let mut failed = 0;
    for (i, (name, f, budget)) in criteria.into_iter().enumerate() {
        if only.is_some_and(|k| k != i + 1) {
            continue;
        }
        let start = Instant::now();
        let o = f();
        let elapsed = start.elapsed();
        let o = within_budget(o, elapsed, budget.map(Duration::from_secs));
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {}: {} ({}; {:.1}s)",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            name,
            o.detail,
            elapsed.as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
