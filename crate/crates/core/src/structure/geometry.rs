//! Equilibrium geometry of random games: supports, ℓ2 norms, pure
//! equilibria, and for reduced instances the decoding defect and the count
//! of "good" deviations per block.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::partition::{beta_unchecked, PartitionParams};
use super::stats::{Proportion, Quantiles};
use crate::error::{Error, Result};
use crate::game::{BimatrixGame, EquilibriumRecord};
use crate::matrix::Matrix;
use crate::reduction::{build_with, decoding_defect, sample_noise_matrix, NoiseSpec, ReductionInstance, ReductionParams};
use crate::seed::derive_subseed;
use crate::solvers::{
    lemke_howson_with, pure_equilibria, solve_zero_sum, support_enumeration, LemkeHowsonOptions, SolverMethod,
};

/// Largest `n` for which the automatic solver choice enumerates supports.
pub const AUTO_ENUMERATION_MAX_N: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReducedGenerator {
    pub b: usize,
    pub ell: usize,
    pub noise: NoiseSpec,
    #[serde(default)]
    pub general_x: bool,
    #[serde(default)]
    pub scale_third: bool,
    #[serde(default = "one")]
    pub signal_scale: f64,
    /// Fixed source game; when absent each trial draws `P`, `Q` i.i.d.
    /// uniform on `[-1, 1]`.
    #[serde(default)]
    pub source: Option<BimatrixGame>,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GameGenerator {
    /// `A`, `B` i.i.d. uniform on `[-1, 1]`.
    IidUniform,
    /// `A` uniform on `[-1, 1]`, `B = −A`.
    ZeroSumUniform,
    /// `A` uniform on `{±1}`, `B = −A`.
    ZeroSumRademacher,
    ReducedInstance(ReducedGenerator),
}

impl GameGenerator {
    pub fn is_zero_sum(&self) -> bool {
        matches!(self, Self::ZeroSumUniform | Self::ZeroSumRademacher)
    }

    /// Game size; reduced instances fix it to `b·ℓ`.
    pub fn size(&self, n: usize) -> usize {
        match self {
            Self::ReducedInstance(r) => r.b * r.ell,
            _ => n,
        }
    }
}

pub enum TrialGame {
    Plain(BimatrixGame),
    Reduced(Box<ReductionInstance>),
}

impl TrialGame {
    pub fn game(&self) -> &BimatrixGame {
        match self {
            Self::Plain(g) => g,
            Self::Reduced(inst) => &inst.reduced,
        }
    }
}

/// Draws the game for one trial from its sub-seed.
pub fn generate_game(generator: &GameGenerator, n: usize, seed: u64) -> Result<TrialGame> {
    let n = generator.size(n);
    if n == 0 {
        return Err(Error::InvalidArgument("game size must be positive".into()));
    }
    let uniform = NoiseSpec::uniform(1.0);
    let draw = |spec: &NoiseSpec, k: usize, label: &str| sample_noise_matrix(spec, k, derive_subseed(seed, label, 0));
    Ok(match generator {
        GameGenerator::IidUniform => TrialGame::Plain(BimatrixGame::new(draw(&uniform, n, "A")?, draw(&uniform, n, "B")?)?),
        GameGenerator::ZeroSumUniform => TrialGame::Plain(BimatrixGame::zero_sum(draw(&uniform, n, "A")?)?),
        GameGenerator::ZeroSumRademacher => {
            TrialGame::Plain(BimatrixGame::zero_sum(draw(&NoiseSpec::rademacher(1.0), n, "A")?)?)
        }
        GameGenerator::ReducedInstance(r) => {
            if r.b == 0 || r.ell == 0 {
                return Err(Error::InvalidArgument("reduced instance needs b ≥ 1 and ℓ ≥ 1".into()));
            }
            let source = match &r.source {
                Some(g) if g.rows() == r.b && g.cols() == r.b => g.clone(),
                Some(g) => {
                    return Err(Error::Dimension(format!("source is {}×{}, b = {}", g.rows(), g.cols(), r.b)));
                }
                None => BimatrixGame::new(draw(&uniform, r.b, "P")?, draw(&uniform, r.b, "Q")?)?,
            };
            let params = ReductionParams {
                general_x: r.general_x,
                scale_third: r.scale_third,
                signal_scale: r.signal_scale,
                ..ReductionParams::new(r.ell, r.noise.clone(), derive_subseed(seed, "reduction", 0))
            };
            TrialGame::Reduced(Box::new(build_with(&source, &params)?))
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverChoice {
    /// Support enumeration up to `n = 10`, the LP for zero-sum games,
    /// Lemke–Howson from label 0 otherwise.
    Auto,
    Lp,
    LemkeHowson,
    SupportEnumeration,
}

impl SolverChoice {
    pub fn resolve(self, generator: &GameGenerator, n: usize) -> SolverMethod {
        match self {
            Self::Lp => SolverMethod::Lp,
            Self::LemkeHowson => SolverMethod::LemkeHowson,
            Self::SupportEnumeration => SolverMethod::SupportEnumeration,
            Self::Auto if n <= AUTO_ENUMERATION_MAX_N => SolverMethod::SupportEnumeration,
            Self::Auto if generator.is_zero_sum() => SolverMethod::Lp,
            Self::Auto => SolverMethod::LemkeHowson,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub generator: GameGenerator,
    /// Ignored for reduced instances, whose size is `b·ℓ`.
    pub n: usize,
    pub trials: u64,
    pub seed: u64,
    #[serde(default = "auto")]
    pub solver: SolverChoice,
    /// Threshold constant of the good-index test.
    #[serde(default = "default_c")]
    pub c: f64,
    /// Partition parameters for β; desk defaults for `n` when absent.
    #[serde(default)]
    pub partition: Option<PartitionParams>,
    /// Per-trial wall-clock limit, enforced inside Lemke–Howson.
    #[serde(default)]
    pub timeout_secs: Option<f64>,
    /// Support tolerance τ for the reported support sizes; the solver's
    /// own tolerance when absent.
    #[serde(default)]
    pub support_tol: Option<f64>,
}

fn auto() -> SolverChoice {
    SolverChoice::Auto
}

fn default_c() -> f64 {
    0.1
}

impl GeometryConfig {
    pub fn new(generator: GameGenerator, n: usize, trials: u64, seed: u64) -> Self {
        Self { generator, n, trials, seed, solver: SolverChoice::Auto, c: default_c(), partition: None, timeout_secs: None, support_tol: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialStatus {
    Ok,
    Failed,
    Timeout,
}

impl TrialStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Ok => "ok",
            Self::Failed => "failed",
            Self::Timeout => "timeout",
        }
    }
}

/// Good-index counts per block: rows `i ∉ supp(x)` with
/// `eᵢᵀ(Z₀+Z₁+A_ε)y > c·β(y)` and columns `j ∉ supp(y)` with
/// `xᵀ(B_ε−Z₀−Z₁)eⱼ > c·β(x)`. Gadget matrices are taken unscaled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Goodness {
    pub s_good: Vec<usize>,
    pub t_good: Vec<usize>,
    pub beta_x: f64,
    pub beta_y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialGeometry {
    pub index: u64,
    pub subseed: u64,
    pub status: TrialStatus,
    pub message: Option<String>,
    pub method: SolverMethod,
    pub n: usize,
    pub pure_equilibria: usize,
    pub equilibria_found: usize,
    /// Geometry of the first equilibrium found.
    pub support_sizes: Option<(usize, usize)>,
    pub l2_norms: Option<(f64, f64)>,
    pub max_regret: Option<f64>,
    pub work: Option<usize>,
    pub defect: Option<f64>,
    pub goodness: Option<Goodness>,
    /// Wall-clock time; kept out of the deterministic outputs.
    #[serde(skip)]
    pub elapsed: Duration,
}

impl TrialGeometry {
    pub fn support_fraction(&self) -> Option<f64> {
        self.support_sizes.map(|(s, t)| (s + t) as f64 / (2 * self.n) as f64)
    }

    pub fn mean_l2(&self) -> Option<f64> {
        self.l2_norms.map(|(a, b)| 0.5 * (a + b))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryStats {
    pub trials: Vec<TrialGeometry>,
    pub ok: u64,
    pub failed: u64,
    pub timeout: u64,
    /// Trials (with status ok) whose game has a pure equilibrium.
    pub pure: Proportion,
    /// Mean of the two support sizes over `n`.
    pub support_fraction: Quantiles,
    /// Mean of the two ℓ2 norms.
    pub l2_norm: Quantiles,
    pub max_regret: Quantiles,
    pub defect: Quantiles,
    /// Fraction of off-support indices that are good, both players pooled.
    pub good_fraction: Quantiles,
}

pub fn goodness(
    inst: &ReductionInstance,
    eq: &EquilibriumRecord,
    c: f64,
    params: &PartitionParams,
    tol: f64,
) -> Result<Goodness> {
    let (x, y) = (eq.x.weights(), eq.y.weights());
    let beta_x = beta_unchecked(x, params);
    let beta_y = beta_unchecked(y, params);
    let ry = inst.row_noise()?.mul_vec(y);
    let xc = inst.col_noise()?.vec_mul(x);
    let bm = &inst.block_map;
    let mut s_good = vec![0usize; bm.b];
    let mut t_good = vec![0usize; bm.b];
    for i in 0..bm.n {
        if x[i] <= tol && ry[i] > c * beta_y {
            s_good[bm.block_of(i)] += 1;
        }
        if y[i] <= tol && xc[i] > c * beta_x {
            t_good[bm.block_of(i)] += 1;
        }
    }
    Ok(Goodness { s_good, t_good, beta_x, beta_y })
}

fn solve(game: &BimatrixGame, method: SolverMethod, deadline: Option<Instant>) -> Result<(Vec<EquilibriumRecord>, usize)> {
    match method {
        SolverMethod::Lp => {
            let sol = solve_zero_sum(game.payoff_a())?;
            Ok((vec![EquilibriumRecord::new(game, sol.x, sol.y)?], sol.pivots))
        }
        SolverMethod::LemkeHowson => {
            let opts = LemkeHowsonOptions { deadline, ..LemkeHowsonOptions::default() };
            let out = lemke_howson_with(game, 0, &opts)?;
            Ok((vec![out.record], out.pivots))
        }
        SolverMethod::SupportEnumeration => {
            let r = support_enumeration(game, game.rows().min(game.cols()))?;
            Ok((r.equilibria, r.work))
        }
    }
}

fn count_above(w: &[f64], tol: f64) -> usize {
    w.iter().filter(|&&v| v > tol).count()
}

/// Runs one trial; solver errors become a non-ok status.
pub fn run_geometry_trial(config: &GeometryConfig, index: u64) -> Result<TrialGeometry> {
    let start = Instant::now();
    let n = config.generator.size(config.n);
    let subseed = derive_subseed(config.seed, "trial", index);
    let method = config.solver.resolve(&config.generator, n);
    let mut rec = TrialGeometry {
        index,
        subseed,
        status: TrialStatus::Ok,
        message: None,
        method,
        n,
        pure_equilibria: 0,
        equilibria_found: 0,
        support_sizes: None,
        l2_norms: None,
        max_regret: None,
        work: None,
        defect: None,
        goodness: None,
        elapsed: Duration::ZERO,
    };
    let trial = generate_game(&config.generator, n, subseed)?;
    rec.pure_equilibria = pure_equilibria(trial.game()).len();
    let deadline = config.timeout_secs.map(|s| start + Duration::from_secs_f64(s));
    match solve(trial.game(), method, deadline) {
        Ok((eqs, work)) => {
            rec.equilibria_found = eqs.len();
            rec.work = Some(work);
            if let Some(eq) = eqs.first() {
                rec.support_sizes = Some(match config.support_tol {
                    Some(tol) => (count_above(eq.x.weights(), tol), count_above(eq.y.weights(), tol)),
                    None => eq.support_sizes,
                });
                rec.l2_norms = Some(eq.l2_norms);
                rec.max_regret = Some(eq.max_regret());
                if let TrialGame::Reduced(inst) = &trial {
                    let params = config.partition.unwrap_or_else(|| PartitionParams::desk_default(n));
                    rec.defect = Some(decoding_defect(inst, &eq.x, &eq.y)?);
                    let tol = config.support_tol.unwrap_or(eq.x.tolerance());
                    rec.goodness = Some(goodness(inst, eq, config.c, &params, tol)?);
                }
            } else {
                rec.status = TrialStatus::Failed;
                rec.message = Some("no equilibrium found".into());
            }
        }
        Err(Error::Timeout) => {
            rec.status = TrialStatus::Timeout;
            rec.message = Some("wall-clock limit reached".into());
        }
        Err(e) => {
            rec.status = TrialStatus::Failed;
            rec.message = Some(e.to_string());
        }
    }
    rec.elapsed = start.elapsed();
    Ok(rec)
}

/// Aggregates trial records (in the order given).
pub fn summarize(trials: Vec<TrialGeometry>) -> GeometryStats {
    let count = |s| trials.iter().filter(|t| t.status == s).count() as u64;
    let ok: Vec<&TrialGeometry> = trials.iter().filter(|t| t.status == TrialStatus::Ok).collect();
    let collect = |f: &dyn Fn(&TrialGeometry) -> Option<f64>| Quantiles::of(&ok.iter().filter_map(|t| f(t)).collect::<Vec<f64>>());
    let pure = Proportion::new(ok.iter().filter(|t| t.pure_equilibria > 0).count() as u64, ok.len() as u64);
    let good_fraction = collect(&|t| {
        let g = t.goodness.as_ref()?;
        let (s, u) = t.support_sizes?;
        let off = 2 * t.n - s - u;
        (off > 0).then(|| (g.s_good.iter().sum::<usize>() + g.t_good.iter().sum::<usize>()) as f64 / off as f64)
    });
    GeometryStats {
        ok: count(TrialStatus::Ok),
        failed: count(TrialStatus::Failed),
        timeout: count(TrialStatus::Timeout),
        pure,
        support_fraction: collect(&|t| t.support_fraction()),
        l2_norm: collect(&|t| t.mean_l2()),
        max_regret: collect(&|t| t.max_regret),
        defect: collect(&|t| t.defect),
        good_fraction,
        trials,
    }
}

/// Runs all trials on the current rayon pool; results are in index order
/// whatever the number of workers.
pub fn equilibrium_geometry_experiment(config: &GeometryConfig) -> Result<GeometryStats> {
    let trials: Vec<TrialGeometry> =
        (0..config.trials).into_par_iter().map(|i| run_geometry_trial(config, i)).collect::<Result<_>>()?;
    Ok(summarize(trials))
}

/// Probability that a uniformly random `±1` 2×2 zero-sum game has a saddle
/// point, by enumerating all 16 matrices.
pub fn exact_rademacher_2x2_pure_probability() -> f64 {
    let mut hits = 0;
    for mask in 0..16u32 {
        let e: Vec<f64> = (0..4).map(|k| if mask >> k & 1 == 1 { 1.0 } else { -1.0 }).collect();
        let g = BimatrixGame::zero_sum(Matrix::from_vec(2, 2, e).expect("2×2")).expect("valid game");
        if !pure_equilibria(&g).is_empty() {
            hits += 1;
        }
    }
    f64::from(hits) / 16.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rademacher_2x2_by_hand() {
        // With B = −A a cell (i, j) is a saddle point when it is the row
        // minimum and column maximum. Of the 16 sign matrices only the two
        // "diagonal" ones [[1,−1],[−1,1]] and [[−1,1],[1,−1]] lack one.
        assert_eq!(exact_rademacher_2x2_pure_probability(), 14.0 / 16.0);
    }

    #[test]
    fn deterministic_and_ordered() {
        let cfg = GeometryConfig::new(GameGenerator::IidUniform, 6, 12, 42);
        let a = equilibrium_geometry_experiment(&cfg).unwrap();
        let b = equilibrium_geometry_experiment(&cfg).unwrap();
        let json = |s: &GeometryStats| serde_json::to_string(s).unwrap();
        assert_eq!(json(&a), json(&b));
        assert!(a.trials.iter().enumerate().all(|(i, t)| t.index == i as u64));
        assert!(a.trials.iter().all(|t| t.method == SolverMethod::SupportEnumeration));
        assert_eq!(a.ok, 12);
    }

    #[test]
    fn zero_sum_uses_lp_and_bounds_hold() {
        let cfg = GeometryConfig::new(GameGenerator::ZeroSumUniform, 16, 10, 7);
        let s = equilibrium_geometry_experiment(&cfg).unwrap();
        for t in &s.trials {
            assert_eq!(t.method, SolverMethod::Lp);
            let (a, b) = t.support_sizes.unwrap();
            assert!(a <= 16 && b <= 16);
            let (x, y) = t.l2_norms.unwrap();
            for v in [x, y] {
                assert!((0.25 - 1e-12..=1.0 + 1e-12).contains(&v));
            }
        }
    }

    #[test]
    fn reduced_trials_report_defect_and_goodness() {
        let gen = GameGenerator::ReducedInstance(ReducedGenerator {
            b: 2,
            ell: 4,
            noise: NoiseSpec::uniform(0.1),
            general_x: false,
            scale_third: false,
            signal_scale: 1.0,
            source: None,
        });
        let mut cfg = GeometryConfig::new(gen, 0, 3, 1);
        cfg.solver = SolverChoice::LemkeHowson;
        let s = equilibrium_geometry_experiment(&cfg).unwrap();
        for t in &s.trials {
            assert_eq!(t.n, 8);
            assert!(t.defect.is_some());
            assert_eq!(t.goodness.as_ref().unwrap().s_good.len(), 2);
        }
    }

    #[test]
    fn empty_run_has_null_aggregates() {
        let cfg = GeometryConfig::new(GameGenerator::ZeroSumRademacher, 4, 0, 0);
        let s = equilibrium_geometry_experiment(&cfg).unwrap();
        assert!(s.trials.is_empty());
        assert!(s.pure.estimate.is_none());
        assert!(s.support_fraction.median.is_none());
    }
}
