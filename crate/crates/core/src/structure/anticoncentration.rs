//! Probability that a Rademacher combination `⟨v, x⟩` clears a threshold.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::partition::{benchmark_beta, PartitionParams};
use super::stats::Proportion;
use crate::error::{Error, Result};
use crate::seed::{derive_subseed, rng_from_seed};

/// Largest number of nonzero coordinates enumerated exactly.
pub const MAX_EXACT_NONZEROS: usize = 20;

/// Relative slack used when comparing `⟨v, x⟩` against the threshold, so that
/// ties that hold in exact arithmetic are not lost to rounding.
pub const THRESHOLD_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateMode {
    /// Exact when the support is small enough, Monte Carlo otherwise.
    Auto,
    Exact,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AntiConcentrationEstimate {
    pub threshold: f64,
    pub beta: f64,
    pub probability: f64,
    pub exact: bool,
    /// Sign patterns counted (over the nonzero coordinates when exact).
    pub proportion: Proportion,
}

fn hits(sum: f64, threshold: f64, scale: f64) -> bool {
    sum >= threshold - THRESHOLD_SLACK * scale
}

/// Exact `Pr[⟨v, x⟩ ≥ threshold]` over uniform `v ∈ {±1}ⁿ`. Coordinates equal to
/// zero do not affect the sum, so only the nonzero ones are enumerated.
pub fn exact_sign_tail(x: &[f64], threshold: f64) -> Result<Proportion> {
    let nz: Vec<f64> = x.iter().copied().filter(|v| *v != 0.0).collect();
    if nz.len() > MAX_EXACT_NONZEROS {
        return Err(Error::InvalidArgument(format!(
            "exact enumeration supports at most {MAX_EXACT_NONZEROS} nonzeros, got {}",
            nz.len()
        )));
    }
    let scale = nz.iter().map(|v| v.abs()).sum::<f64>().max(threshold.abs()).max(1.0);
    let total = 1u64 << nz.len();
    let mut count = 0u64;
    for mask in 0..total {
        let sum: f64 = nz
            .iter()
            .enumerate()
            .map(|(j, &v)| if mask >> j & 1 == 1 { v } else { -v })
            .sum();
        if hits(sum, threshold, scale) {
            count += 1;
        }
    }
    Ok(Proportion::new(count, total))
}

/// Monte Carlo `Pr[⟨v, x⟩ ≥ threshold]`; trial `t` uses its own generator
/// seeded from `(seed, t)`.
pub fn monte_carlo_sign_tail(x: &[f64], threshold: f64, trials: u64, seed: u64) -> Proportion {
    let scale = x.iter().map(|v| v.abs()).sum::<f64>().max(threshold.abs()).max(1.0);
    let mut count = 0u64;
    for t in 0..trials {
        let mut rng = rng_from_seed(derive_subseed(seed, "anticoncentration", t));
        let mut sum = 0.0;
        for chunk in x.chunks(64) {
            let bits: u64 = rng.random();
            for (j, &v) in chunk.iter().enumerate() {
                sum += if bits >> j & 1 == 1 { v } else { -v };
            }
        }
        if hits(sum, threshold, scale) {
            count += 1;
        }
    }
    Proportion::new(count, trials)
}

/// Estimates `Pr[⟨v, x⟩ ≥ c·β(x)]` for Rademacher `v`.
pub fn anti_concentration_estimate(
    x: &[f64],
    params: &PartitionParams,
    c: f64,
    trials: u64,
    seed: u64,
    mode: EstimateMode,
) -> Result<AntiConcentrationEstimate> {
    let beta = benchmark_beta(x, params)?;
    let threshold = c * beta;
    let nonzeros = x.iter().filter(|v| **v != 0.0).count();
    let exact = match mode {
        EstimateMode::Exact => true,
        EstimateMode::MonteCarlo => false,
        EstimateMode::Auto => nonzeros <= MAX_EXACT_NONZEROS,
    };
    let proportion = if exact {
        exact_sign_tail(x, threshold)?
    } else {
        monte_carlo_sign_tail(x, threshold, trials, seed)
    };
    Ok(AntiConcentrationEstimate {
        threshold,
        beta,
        probability: proportion.estimate.unwrap_or(f64::NAN),
        exact,
        proportion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_hot_is_half() {
        let p = PartitionParams::new(4.0, 2).unwrap();
        let e = anti_concentration_estimate(&[0.0, 1.0, 0.0], &p, 1.0, 0, 0, EstimateMode::Exact).unwrap();
        assert_eq!(e.probability, 0.5);
        assert!(e.exact);
    }

    #[test]
    fn two_halves_is_quarter() {
        let p = PartitionParams::new(4.0, 2).unwrap();
        let e = anti_concentration_estimate(&[0.5, 0.5], &p, 1.0, 0, 0, EstimateMode::Auto).unwrap();
        assert_eq!(e.beta, 1.0);
        assert_eq!(e.probability, 0.25);
    }

    #[test]
    fn exact_matches_hand_enumeration() {
        // Sums of ±0.5 ± 0.3 ± 0.2: {1.0, 0.6, 0.4, 0.0, 0.0, -0.4, -0.6, -1.0}.
        let x = [0.5, 0.3, 0.2];
        assert_eq!(exact_sign_tail(&x, 0.4).unwrap().successes, 3);
        assert_eq!(exact_sign_tail(&x, 0.0).unwrap().successes, 5);
        assert!(exact_sign_tail(&[0.01; 21], 0.0).is_err());
    }

    #[test]
    fn monte_carlo_is_deterministic_and_close() {
        let x = [0.4, 0.3, 0.2, 0.1];
        let a = monte_carlo_sign_tail(&x, 0.2, 20_000, 5);
        let b = monte_carlo_sign_tail(&x, 0.2, 20_000, 5);
        assert_eq!(a, b);
        let exact = exact_sign_tail(&x, 0.2).unwrap().estimate.unwrap();
        assert!(a.contains(exact), "{a:?} vs {exact}");
    }
}
