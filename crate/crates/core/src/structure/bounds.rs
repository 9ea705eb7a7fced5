//! Exact checks of three combinatorial inequalities about sums of random
//! signs and binomial coefficients.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest `n` for the 2ⁿ sign enumeration.
pub const MAX_ERDOS_N: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErdosReport {
    /// Sign patterns with `Σ aᵢεᵢ ≥ k − 1`.
    pub lhs_count: u64,
    /// Sign patterns with `Σ εᵢ ≥ k`.
    pub rhs_count: u64,
    pub patterns: u64,
    pub holds: bool,
}

/// Compares `Pr[Σ aᵢεᵢ ≥ k−1]` with `Pr[Σ εᵢ ≥ k]` over all sign patterns.
pub fn erdos_dominance_check(a: &[f64], k: i64) -> Result<ErdosReport> {
    if a.len() > MAX_ERDOS_N {
        return Err(Error::InvalidArgument(format!("n = {} exceeds {MAX_ERDOS_N}", a.len())));
    }
    if let Some(bad) = a.iter().find(|v| !(**v >= 1.0 && v.is_finite())) {
        return Err(Error::InvalidArgument(format!("coefficient {bad} is below 1")));
    }
    if k < 1 {
        return Err(Error::InvalidArgument(format!("k = {k} must be at least 1")));
    }
    let n = a.len();
    let patterns = 1u64 << n;
    let (mut lhs, mut rhs) = (0u64, 0u64);
    for mask in 0..patterns {
        let mut weighted = 0.0;
        for (j, &v) in a.iter().enumerate() {
            weighted += if mask >> j & 1 == 1 { v } else { -v };
        }
        let plain = 2 * i64::from(mask.count_ones()) - n as i64;
        if weighted >= (k - 1) as f64 {
            lhs += 1;
        }
        if plain >= k {
            rhs += 1;
        }
    }
    Ok(ErdosReport { lhs_count: lhs, rhs_count: rhs, patterns, holds: lhs >= rhs })
}

/// Natural log of a positive big integer, accurate to double precision.
pub fn ln_big(v: &BigUint) -> f64 {
    let bits = v.bits();
    if bits <= 1000 {
        return v.to_f64().expect("fits in f64").ln();
    }
    let shift = bits - 64;
    let top = (v >> shift).to_f64().expect("64-bit value");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Row `n` of Pascal's triangle, `C(n, 0..=n)`.
pub fn binomial_row(n: u64) -> Vec<BigUint> {
    let mut row = Vec::with_capacity(n as usize + 1);
    let mut c = BigUint::one();
    for i in 0..=n {
        row.push(c.clone());
        c = c * (n - i) / (i + 1);
    }
    row
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinomTailCase {
    pub n: u64,
    pub k: u64,
    /// First index of the tail, `⌈(n+k)/2⌉`.
    pub start: u64,
    /// `ln` of `2^{-n} Σ_{i ≥ start} C(n,i)`.
    pub ln_lhs: f64,
    /// `ln` of `e^{-10k²/n} / 10⁴`.
    pub ln_rhs: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinomTailReport {
    pub evaluated: usize,
    /// Pairs with `n + k` odd, evaluated with the rounded-up start.
    pub odd_parity: usize,
    pub failures: Vec<BinomTailCase>,
}

impl BinomTailReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

fn tail_cases(n: u64, ks: impl Iterator<Item = u64>) -> Vec<BinomTailCase> {
    let row = binomial_row(n);
    // suffix[i] = Σ_{j ≥ i} C(n, j)
    let mut suffix = vec![BigUint::zero(); row.len() + 1];
    for i in (0..row.len()).rev() {
        suffix[i] = &suffix[i + 1] + &row[i];
    }
    let ln_total = n as f64 * std::f64::consts::LN_2;
    ks.map(|k| {
        let start = (n + k).div_ceil(2);
        let ln_lhs = ln_big(&suffix[start as usize]) - ln_total;
        let ln_rhs = -10.0 * (k * k) as f64 / n as f64 - 10_000f64.ln();
        BinomTailCase { n, k, start, ln_lhs, ln_rhs, holds: ln_lhs >= ln_rhs }
    })
    .collect()
}

/// Evaluates every pair of `n_values × k_values` with `k ≤ n`, `n ≥ 1`.
pub fn binom_tail_lower_bound_check(n_values: &[u64], k_values: &[u64]) -> BinomTailReport {
    let mut report = BinomTailReport { evaluated: 0, odd_parity: 0, failures: Vec::new() };
    for &n in n_values.iter().filter(|&&n| n >= 1) {
        let ks: Vec<u64> = k_values.iter().copied().filter(|&k| k <= n).collect();
        for case in tail_cases(n, ks.into_iter()) {
            report.evaluated += 1;
            if (case.n + case.k) % 2 == 1 {
                report.odd_parity += 1;
            }
            if !case.holds {
                report.failures.push(case);
            }
        }
    }
    report
}

/// Every `(n, k)` with `n_min ≤ n ≤ n_max`, `0 ≤ k ≤ n`, and `n + k` even.
pub fn binom_tail_sweep(n_min: u64, n_max: u64) -> BinomTailReport {
    let mut report = BinomTailReport { evaluated: 0, odd_parity: 0, failures: Vec::new() };
    for n in n_min.max(1)..=n_max {
        for case in tail_cases(n, (n % 2..=n).step_by(2)) {
            report.evaluated += 1;
            if !case.holds {
                report.failures.push(case);
            }
        }
    }
    report
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyCase {
    pub n: u64,
    pub k: u64,
    pub log2_binomial: f64,
    /// `n·H(k/n) − ½·log₂(8n)`.
    pub log2_bound: f64,
    pub holds: bool,
}

/// Binary entropy with `0·log 0 = 0`.
pub fn binary_entropy(p: f64) -> f64 {
    let term = |q: f64| if q <= 0.0 { 0.0 } else { -q * q.log2() };
    term(p) + term(1.0 - p)
}

fn entropy_case(n: u64, k: u64, c: &BigUint) -> EntropyCase {
    let log2_binomial = ln_big(c) / std::f64::consts::LN_2;
    let log2_bound = n as f64 * binary_entropy(k as f64 / n as f64) - 0.5 * (8.0 * n as f64).log2();
    EntropyCase { n, k, log2_binomial, log2_bound, holds: log2_binomial >= log2_bound }
}

/// `C(n, k) ≥ 2^{nH(k/n)} / √(8n)`, with `C(n,k)` exact.
pub fn entropy_binom_check(n: u64, k: u64) -> Result<EntropyCase> {
    if n == 0 || k > n {
        return Err(Error::InvalidArgument(format!("need 0 ≤ k ≤ n and n ≥ 1, got n={n}, k={k}")));
    }
    let mut c = BigUint::one();
    for i in 0..k {
        c = c * (n - i) / (i + 1);
    }
    Ok(entropy_case(n, k, &c))
}

/// All `1 ≤ n ≤ n_max`, `0 ≤ k ≤ n`; returns the cases that fail.
pub fn entropy_binom_sweep(n_max: u64) -> (usize, Vec<EntropyCase>) {
    let mut evaluated = 0;
    let mut failures = Vec::new();
    for n in 1..=n_max {
        for (k, c) in binomial_row(n).iter().enumerate() {
            evaluated += 1;
            let case = entropy_case(n, k as u64, c);
            if !case.holds {
                failures.push(case);
            }
        }
    }
    (evaluated, failures)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn erdos_examples() {
        let r = erdos_dominance_check(&[1.0, 1.0, 1.0], 1).unwrap();
        assert_eq!((r.lhs_count, r.rhs_count, r.patterns), (4, 4, 8));
        let r = erdos_dominance_check(&[5.0, 1.0], 2).unwrap();
        assert_eq!((r.lhs_count, r.rhs_count), (2, 1));
        let r = erdos_dominance_check(&[1.5, 2.0], 3).unwrap();
        assert_eq!(r.rhs_count, 0);
        assert!(r.holds);
        assert!(erdos_dominance_check(&[0.5], 1).is_err());
        assert!(erdos_dominance_check(&[1.0], 0).is_err());
    }

    #[test]
    fn binomial_rows() {
        let row: Vec<u64> = binomial_row(5).iter().map(|c| c.to_u64().unwrap()).collect();
        assert_eq!(row, vec![1, 5, 10, 10, 5, 1]);
        let big = &binomial_row(100)[50];
        assert_eq!(big.to_string(), "100891344545564193334812497256");
        assert!((ln_big(big) - 100891344545564193334812497256f64.ln()).abs() < 1e-12);
        let huge = &binomial_row(3000)[1500];
        // Stirling: ln C(2m, m) ≈ 2m ln 2 − ½ ln(πm).
        let approx = 3000.0 * std::f64::consts::LN_2 - 0.5 * (std::f64::consts::PI * 1500.0).ln();
        assert!((ln_big(huge) - approx).abs() < 1e-4);
    }

    #[test]
    fn binom_tail_examples() {
        // Pr[Bin(100, ½) ≥ 55] from an independent running sum in f64.
        let mut c = 1.0f64;
        let mut tail = 0.0;
        for i in 0..=100u32 {
            if i >= 55 {
                tail += c;
            }
            c = c * f64::from(100 - i) / f64::from(i + 1);
        }
        tail /= 2f64.powi(100);
        let case = tail_cases(100, std::iter::once(10))[0];
        assert!((case.ln_lhs - tail.ln()).abs() < 1e-10);
        assert!(case.holds);
        let zero = tail_cases(31, std::iter::once(0))[0];
        assert!((zero.ln_lhs - 0.5f64.ln()).abs() < 1e-12);
        let full = tail_cases(40, std::iter::once(40))[0];
        assert!((full.ln_lhs + 40.0 * std::f64::consts::LN_2).abs() < 1e-12);
        assert!(full.holds);
        let r = binom_tail_lower_bound_check(&[10, 11], &[1, 2, 20]);
        assert_eq!((r.evaluated, r.odd_parity), (4, 2));
    }

    #[test]
    fn entropy_examples() {
        assert!(entropy_binom_check(7, 0).unwrap().holds);
        assert!(entropy_binom_check(100, 50).unwrap().holds);
        for k in 0..=10 {
            assert!(entropy_binom_check(10, k).unwrap().holds);
        }
        let (count, failures) = entropy_binom_sweep(60);
        assert_eq!(count, (2..=61).sum::<usize>());
        assert!(failures.is_empty());
        assert_eq!(binary_entropy(0.0), 0.0);
        assert_eq!(binary_entropy(0.5), 1.0);
    }
}
