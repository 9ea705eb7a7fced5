use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reduction::NoiseSpec;
use crate::structure::{GameGenerator, PartitionParams, ReducedGenerator, SolverChoice};

/// Environment variable naming the root directory for runs without an
/// explicit output directory.
pub const OUTPUT_ROOT_ENV: &str = "SMOOTHNASH_OUT";

pub const DEFAULT_TIMEOUT_SECS: f64 = 60.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    /// Equilibrium geometry of games from `generator`.
    Geometry,
    /// Reduced instances solved and decoded back to their source game.
    Decoding,
    /// Bilinear concentration probe on Rademacher matrices.
    Bilinear,
    /// Interval density of projected uniform point clouds.
    Halfspace,
    /// Rademacher anti-concentration for random distributions.
    AntiConcentration,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Geometry => "geometry",
            Self::Decoding => "decoding",
            Self::Bilinear => "bilinear",
            Self::Halfspace => "halfspace",
            Self::AntiConcentration => "anti_concentration",
        }
    }
}

/// Desk-scale parameter overrides; unset fields take the per-experiment
/// defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    /// Source game size of reduced instances.
    pub b: Option<usize>,
    /// Block length of reduced instances.
    pub ell: Option<usize>,
    /// Partition level ratio.
    pub d: Option<f64>,
    /// Partition level count.
    pub l: Option<usize>,
    /// Threshold constant for good indices and anti-concentration.
    pub c: Option<f64>,
    /// Half-width of the uniform smoothing noise.
    pub epsilon: Option<f64>,
    /// Support tolerance.
    pub tau: Option<f64>,
    /// Multiplier on the source game before tensoring.
    pub signal_scale: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub trials: u64,
    pub seed: u64,
    /// Problem size; ignored by decoding runs, whose size is `b·ℓ`.
    #[serde(default)]
    pub n: usize,
    /// Game generator for geometry runs.
    #[serde(default)]
    pub generator: Option<GameGenerator>,
    /// Smoothing noise for decoding runs; uniform with half-width ε when absent.
    #[serde(default)]
    pub noise: Option<NoiseSpec>,
    #[serde(default = "auto")]
    pub solver: SolverChoice,
    /// Samples per trial: bilinear pairs, halfspace directions, or Monte
    /// Carlo sign vectors.
    #[serde(default)]
    pub samples: Option<u64>,
    /// Ambient dimension of halfspace point clouds.
    #[serde(default)]
    pub dimension: Option<usize>,
    /// Window length of the halfspace probe.
    #[serde(default)]
    pub interval_len: Option<f64>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    /// Worker threads; all available cores when absent.
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default = "default_timeout")]
    pub timeout_secs: f64,
    #[serde(default)]
    pub overrides: Overrides,
}

fn auto() -> SolverChoice {
    SolverChoice::Auto
}

fn default_timeout() -> f64 {
    DEFAULT_TIMEOUT_SECS
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind, trials: u64, seed: u64) -> Self {
        Self {
            kind,
            trials,
            seed,
            n: 0,
            generator: None,
            noise: None,
            solver: SolverChoice::Auto,
            samples: None,
            dimension: None,
            interval_len: None,
            output_dir: None,
            workers: None,
            timeout_secs: DEFAULT_TIMEOUT_SECS,
            overrides: Overrides::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.timeout_secs > 0.0) {
            return bad(format!("timeout_secs must be positive, got {}", self.timeout_secs));
        }
        if self.workers == Some(0) {
            return bad("workers must be at least 1".into());
        }
        let o = &self.overrides;
        if o.d.is_some_and(|d| !(d > 1.0)) || o.l == Some(0) {
            return bad("partition needs d > 1 and l ≥ 1".into());
        }
        if o.b == Some(0) || o.ell == Some(0) {
            return bad("b and ell must be positive".into());
        }
        if o.tau.is_some_and(|t| !(t >= 0.0)) || o.epsilon.is_some_and(|e| !(e >= 0.0)) {
            return bad("tau and epsilon must be nonnegative".into());
        }
        match self.kind {
            ExperimentKind::Geometry => {
                if self.generator.is_none() {
                    return bad("geometry runs need a generator".into());
                }
                if !matches!(self.generator, Some(GameGenerator::ReducedInstance(_))) && self.n == 0 {
                    return bad("geometry runs need n ≥ 1".into());
                }
            }
            ExperimentKind::Decoding => {
                if let Some(noise) = &self.noise {
                    noise.validate().map_err(|e| Error::Config(e.to_string()))?;
                }
            }
            ExperimentKind::Bilinear | ExperimentKind::AntiConcentration => {
                if self.n == 0 {
                    return bad(format!("{} runs need n ≥ 1", self.kind.as_str()));
                }
            }
            ExperimentKind::Halfspace => {
                if self.n == 0 || self.dimension() == 0 || self.dimension() > self.n {
                    return bad(format!("halfspace runs need 1 ≤ dimension ≤ n, got {} and {}", self.dimension(), self.n));
                }
            }
        }
        Ok(())
    }

    /// Partition parameters for size `n` with any overrides applied.
    pub fn partition(&self, n: usize) -> PartitionParams {
        let base = PartitionParams::desk_default(n);
        PartitionParams { d: self.overrides.d.unwrap_or(base.d), l: self.overrides.l.unwrap_or(base.l) }
    }

    pub fn c(&self) -> f64 {
        self.overrides.c.unwrap_or(0.1)
    }

    pub fn dimension(&self) -> usize {
        self.dimension.unwrap_or(8)
    }

    pub fn interval_len(&self) -> f64 {
        self.interval_len.unwrap_or(0.05)
    }

    pub fn samples(&self) -> u64 {
        self.samples.unwrap_or(match self.kind {
            ExperimentKind::Bilinear => 10_000,
            ExperimentKind::Halfspace => 100,
            _ => 100_000,
        })
    }

    /// Generator actually used: the configured one for geometry runs, a
    /// reduced instance built from the overrides for decoding runs.
    pub fn effective_generator(&self) -> Option<GameGenerator> {
        match self.kind {
            ExperimentKind::Geometry => self.generator.clone().map(|g| match g {
                GameGenerator::ReducedInstance(mut r) => {
                    r.b = self.overrides.b.unwrap_or(r.b);
                    r.ell = self.overrides.ell.unwrap_or(r.ell);
                    r.signal_scale = self.overrides.signal_scale.unwrap_or(r.signal_scale);
                    GameGenerator::ReducedInstance(r)
                }
                g => g,
            }),
            ExperimentKind::Decoding => Some(GameGenerator::ReducedInstance(ReducedGenerator {
                b: self.overrides.b.unwrap_or(4),
                ell: self.overrides.ell.unwrap_or(64),
                noise: self.noise.clone().unwrap_or_else(|| NoiseSpec::uniform(self.overrides.epsilon.unwrap_or(0.1))),
                general_x: false,
                scale_third: false,
                signal_scale: self.overrides.signal_scale.unwrap_or(1.0),
                source: None,
            })),
            _ => None,
        }
    }

    /// Explicit directory, else `$SMOOTHNASH_OUT/<kind>-seed<seed>`, else
    /// `runs/<kind>-seed<seed>`.
    pub fn resolve_output_dir(&self) -> PathBuf {
        if let Some(dir) = &self.output_dir {
            return dir.clone();
        }
        let root = std::env::var_os(OUTPUT_ROOT_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("runs"));
        root.join(format!("{}-seed{}", self.kind.as_str(), self.seed))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_field_is_named() {
        let err = ExperimentConfig::from_json(r#"{"kind":"bilinear","trials":1,"seed":0,"n":8,"sample":3}"#)
            .unwrap_err()
            .to_string();
        assert!(err.contains("sample"), "{err}");
        let err = ExperimentConfig::from_json(r#"{"kind":"bilinear","trials":1,"seed":0,"n":8,"overrides":{"eps":1}}"#)
            .unwrap_err()
            .to_string();
        assert!(err.contains("eps"), "{err}");
    }

    #[test]
    fn round_trip_and_defaults() {
        let cfg = ExperimentConfig::from_json(
            r#"{"kind":"geometry","trials":3,"seed":9,"n":5,"generator":{"kind":"zero_sum_uniform"}}"#,
        )
        .unwrap();
        assert_eq!(cfg.timeout_secs, DEFAULT_TIMEOUT_SECS);
        assert_eq!(cfg.solver, SolverChoice::Auto);
        let back = ExperimentConfig::from_json(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn validation() {
        assert!(ExperimentConfig::from_json(r#"{"kind":"geometry","trials":1,"seed":0,"n":4}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"kind":"halfspace","trials":1,"seed":0,"n":4,"dimension":5}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"kind":"decoding","trials":1,"seed":0,"workers":0}"#).is_err());
        let cfg = ExperimentConfig::from_json(r#"{"kind":"decoding","trials":1,"seed":0,"overrides":{"b":2,"ell":3}}"#)
            .unwrap();
        match cfg.effective_generator().unwrap() {
            GameGenerator::ReducedInstance(r) => assert_eq!((r.b, r.ell, r.noise.bound()), (2, 3, 0.1)),
            g => panic!("{g:?}"),
        }
    }
}
