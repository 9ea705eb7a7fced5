//! One-dimensional noise distributions and i.i.d. matrix sampling.

use std::fmt;
use std::str::FromStr;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::seed::{derive_subseed, rng_from_seed, Rng};

/// A bounded distribution on the reals.
///
/// Text form (used on the command line): `uniform:H`, `rademacher:S`,
/// `point:V`, `table:V1@P1,V2@P2,…`, and `diff(SPEC)` for `X − X′`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum NoiseSpec {
    /// Uniform on `[-half_width, half_width]`.
    UniformInterval { half_width: f64 },
    /// `±scale` with probability ½ each.
    RademacherScaled { scale: f64 },
    /// Finite distribution.
    DiscreteTable { values: Vec<f64>, probs: Vec<f64> },
    /// `X − X′` for independent copies of `inner`.
    DifferenceOf { inner: Box<NoiseSpec> },
}

impl NoiseSpec {
    pub fn uniform(half_width: f64) -> Self {
        Self::UniformInterval { half_width }
    }

    pub fn rademacher(scale: f64) -> Self {
        Self::RademacherScaled { scale }
    }

    pub fn point(value: f64) -> Self {
        Self::DiscreteTable { values: vec![value], probs: vec![1.0] }
    }

    pub fn zero() -> Self {
        Self::point(0.0)
    }

    /// `ε` such that every sample lies in `[-ε, ε]`.
    pub fn bound(&self) -> f64 {
        match self {
            Self::UniformInterval { half_width } => half_width.abs(),
            Self::RademacherScaled { scale } => scale.abs(),
            Self::DiscreteTable { values, .. } => values.iter().fold(0.0, |m, v| m.max(v.abs())),
            Self::DifferenceOf { inner } => 2.0 * inner.bound(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::UniformInterval { half_width } if !(half_width.is_finite() && *half_width >= 0.0) => {
                Err(Error::InvalidArgument(format!("uniform half-width {half_width} must be ≥ 0")))
            }
            Self::RademacherScaled { scale } if !scale.is_finite() => {
                Err(Error::InvalidArgument(format!("rademacher scale {scale} is not finite")))
            }
            Self::DiscreteTable { values, probs } => {
                if values.is_empty() || values.len() != probs.len() {
                    return Err(Error::InvalidArgument(
                        "discrete table needs equally many values and probabilities".into(),
                    ));
                }
                if values.iter().any(|v| !v.is_finite()) || probs.iter().any(|p| !(*p >= 0.0)) {
                    return Err(Error::InvalidArgument("bad discrete table entry".into()));
                }
                let total: f64 = probs.iter().sum();
                if (total - 1.0).abs() > 1e-9 {
                    return Err(Error::InvalidArgument(format!("table probabilities sum to {total}")));
                }
                Ok(())
            }
            Self::DifferenceOf { inner } => inner.validate(),
            _ => Ok(()),
        }
    }

    /// One draw; a difference draws its two copies back to back.
    pub fn draw(&self, rng: &mut Rng) -> f64 {
        match self {
            Self::UniformInterval { half_width } => {
                if *half_width == 0.0 {
                    0.0
                } else {
                    rng.random_range(-*half_width..=*half_width)
                }
            }
            Self::RademacherScaled { scale } => {
                if rng.random::<bool>() {
                    *scale
                } else {
                    -*scale
                }
            }
            Self::DiscreteTable { values, probs } => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for (v, p) in values.iter().zip(probs) {
                    acc += p;
                    if u < acc {
                        return *v;
                    }
                }
                *values.last().expect("validated nonempty")
            }
            Self::DifferenceOf { inner } => {
                let a = inner.draw(rng);
                let b = inner.draw(rng);
                a - b
            }
        }
    }
}

/// `Y = X − X′`.
pub fn symmetrize(spec: &NoiseSpec) -> NoiseSpec {
    NoiseSpec::DifferenceOf { inner: Box::new(spec.clone()) }
}

/// Square `n×n` matrix of i.i.d. draws, deterministic in `(spec, n, seed)`.
///
/// A difference is sampled as two whole matrices of the inner distribution
/// (sub-seeds `diff_left`, `diff_right`) subtracted entrywise, so
/// `sample(diff(X), s) == sample(X, left(s)) − sample(X, right(s))` exactly.
pub fn sample_noise_matrix(spec: &NoiseSpec, n: usize, seed: u64) -> Result<Matrix> {
    if n == 0 {
        return Err(Error::InvalidArgument("noise matrix size must be ≥ 1".into()));
    }
    spec.validate()?;
    match spec {
        NoiseSpec::DifferenceOf { inner } => {
            let (l, r) = difference_parts(inner, n, seed)?;
            l.sub(&r)
        }
        _ => {
            let mut rng = rng_from_seed(seed);
            Ok(Matrix::from_fn(n, n, |_, _| spec.draw(&mut rng)))
        }
    }
}

/// The two inner matrices behind `sample_noise_matrix(diff(inner), n, seed)`.
pub fn difference_parts(inner: &NoiseSpec, n: usize, seed: u64) -> Result<(Matrix, Matrix)> {
    let l = sample_noise_matrix(inner, n, derive_subseed(seed, "diff_left", 0))?;
    let r = sample_noise_matrix(inner, n, derive_subseed(seed, "diff_right", 0))?;
    Ok((l, r))
}

impl fmt::Display for NoiseSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::UniformInterval { half_width } => write!(f, "uniform:{half_width}"),
            Self::RademacherScaled { scale } => write!(f, "rademacher:{scale}"),
            Self::DiscreteTable { values, probs } if values.len() == 1 && probs[0] == 1.0 => {
                write!(f, "point:{}", values[0])
            }
            Self::DiscreteTable { values, probs } => {
                let parts: Vec<String> =
                    values.iter().zip(probs).map(|(v, p)| format!("{v}@{p}")).collect();
                write!(f, "table:{}", parts.join(","))
            }
            Self::DifferenceOf { inner } => write!(f, "diff({inner})"),
        }
    }
}

impl FromStr for NoiseSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let num = |t: &str| {
            t.trim().parse::<f64>().map_err(|e| Error::Parse(format!("bad number {t:?} in noise spec: {e}")))
        };
        if let Some(inner) = s.strip_prefix("diff(").and_then(|r| r.strip_suffix(')')) {
            return Ok(symmetrize(&inner.parse()?));
        }
        let (family, arg) =
            s.split_once(':').ok_or_else(|| Error::Parse(format!("noise spec {s:?} lacks ':'")))?;
        let spec = match family {
            "uniform" => Self::uniform(num(arg)?),
            "rademacher" => Self::rademacher(num(arg)?),
            "point" => Self::point(num(arg)?),
            "table" => {
                let mut values = Vec::new();
                let mut probs = Vec::new();
                for item in arg.split(',') {
                    let (v, p) = item
                        .split_once('@')
                        .ok_or_else(|| Error::Parse(format!("table entry {item:?} lacks '@'")))?;
                    values.push(num(v)?);
                    probs.push(num(p)?);
                }
                Self::DiscreteTable { values, probs }
            }
            other => return Err(Error::Parse(format!("unknown noise family {other:?}"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rademacher_matrix_is_pm_one_and_reproducible() {
        let a = sample_noise_matrix(&NoiseSpec::rademacher(1.0), 3, 11).unwrap();
        assert!(a.as_slice().iter().all(|&v| v == 1.0 || v == -1.0));
        assert_eq!(a, sample_noise_matrix(&NoiseSpec::rademacher(1.0), 3, 11).unwrap());
    }

    #[test]
    fn uniform_matrix_mean_and_bound() {
        // sd of the mean of 10⁴ uniform[-1,1] draws is (1/√3)/100 ≈ 0.0058; 0.02 > 3σ.
        let a = sample_noise_matrix(&NoiseSpec::uniform(1.0), 100, 5).unwrap();
        let mean = a.as_slice().iter().sum::<f64>() / 1e4;
        assert!(mean.abs() < 0.02, "mean {mean}");
        assert!(a.max_abs() <= 1.0);
    }

    #[test]
    fn difference_bound_and_symmetry() {
        let y = symmetrize(&NoiseSpec::uniform(0.5));
        assert_eq!(y.bound(), 1.0);
        let a = sample_noise_matrix(&y, 50, 3).unwrap();
        assert!(a.max_abs() <= 1.0);
    }

    #[test]
    fn difference_of_point_mass_is_zero() {
        let y = symmetrize(&NoiseSpec::point(0.3));
        let mut rng = rng_from_seed(0);
        assert!((0..100).all(|_| y.draw(&mut rng) == 0.0));
        assert!(sample_noise_matrix(&y, 4, 1).unwrap().max_abs() == 0.0);
    }

    #[test]
    fn difference_of_scaled_rademacher_has_quarter_half_quarter() {
        // Enumerating the 4 sign pairs gives {-ε: 1/4, 0: 1/2, ε: 1/4}.
        let y = symmetrize(&NoiseSpec::rademacher(0.05));
        let mut rng = rng_from_seed(9);
        let trials = 400_000;
        let mut counts = [0usize; 3];
        for _ in 0..trials {
            let v = y.draw(&mut rng);
            let slot = if v < -0.05 { 0 } else if v > 0.05 { 2 } else { 1 };
            assert!([-0.1, 0.0, 0.1].iter().any(|t| (v - t).abs() < 1e-15));
            counts[slot] += 1;
        }
        let f: Vec<f64> = counts.iter().map(|&c| c as f64 / trials as f64).collect();
        // 4σ for p = 1/4 at 4e5 trials is ≈ 0.0027.
        assert!((f[0] - 0.25).abs() < 0.003 && (f[1] - 0.5).abs() < 0.003 && (f[2] - 0.25).abs() < 0.003);
    }

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["uniform:0.1", "rademacher:0.05", "point:0.3", "table:-1@0.25,1@0.75", "diff(uniform:0.05)"] {
            let spec: NoiseSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
        assert!("gauss:1".parse::<NoiseSpec>().is_err());
        assert!("table:1@0.5".parse::<NoiseSpec>().is_err());
        assert!("uniform:-1".parse::<NoiseSpec>().is_err());
    }
}
