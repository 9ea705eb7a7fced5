//! Robust partition of a vector into geometric levels, and the benchmark
//! `β(x) = √(ln n)·‖x_dense‖₂ + ‖x_sparse‖₁`.
//!
//! Level `i < L` holds coordinates with `|x_j| ∈ (D^{-i}, D^{-(i-1)}]`; the last
//! level holds everything in `[0, D^{-(L-1)}]`. A level is sparse when it has
//! at most `L` nonzero coordinates. The last level is kept and classified like
//! any other.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{norm_l1, norm_l2};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartitionParams {
    /// Ratio between consecutive level boundaries, `> 1`.
    pub d: f64,
    /// Number of levels, which is also the sparsity threshold.
    pub l: usize,
}

impl PartitionParams {
    pub fn new(d: f64, l: usize) -> Result<Self> {
        if !(d > 1.0 && d.is_finite()) || l == 0 {
            return Err(Error::InvalidArgument(format!("partition needs D > 1 and L ≥ 1, got D={d}, L={l}")));
        }
        Ok(Self { d, l })
    }

    /// `D = 4`, `L = max(2, ⌈log₂ n⌉ / 8)`.
    pub fn desk_default(n: usize) -> Self {
        let log2 = (n.max(1) as f64).log2().ceil() as usize;
        Self { d: 4.0, l: (log2 / 8).max(2) }
    }

    /// Lower boundary `D^{-i}` of level `i` (1-based).
    fn lower(&self, i: usize) -> f64 {
        self.d.powi(-(i as i32))
    }

    /// 1-based level of a coordinate magnitude; boundaries go to the lower level.
    pub fn level_of(&self, v: f64) -> usize {
        let v = v.abs();
        (1..self.l).find(|&i| v > self.lower(i)).unwrap_or(self.l)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Level {
    /// 1-based level index.
    pub index: usize,
    /// `(lower, upper)`; the last level's lower end is 0 and closed.
    pub interval: (f64, f64),
    /// Coordinates in this level (zeros included for the last level).
    pub members: Vec<usize>,
    pub nonzeros: usize,
    pub dense: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionReport {
    pub params: PartitionParams,
    pub levels: Vec<Level>,
    pub sparse_part: Vec<f64>,
    pub dense_part: Vec<f64>,
    /// 1-based indices of dense levels.
    pub dense_levels: Vec<usize>,
    pub beta: f64,
}

fn check_l1(x: &[f64]) -> Result<()> {
    if x.is_empty() {
        return Err(Error::InvalidArgument("empty vector".into()));
    }
    let l1 = norm_l1(x);
    if (l1 - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!("‖x‖₁ = {l1}, expected 1")));
    }
    Ok(())
}

pub fn robust_partition(x: &[f64], params: &PartitionParams) -> Result<PartitionReport> {
    check_l1(x)?;
    let mut levels: Vec<Level> = (1..=params.l)
        .map(|i| Level {
            index: i,
            interval: (if i == params.l { 0.0 } else { params.lower(i) }, params.lower(i - 1)),
            members: Vec::new(),
            nonzeros: 0,
            dense: false,
        })
        .collect();
    for (j, &v) in x.iter().enumerate() {
        let lv = &mut levels[params.level_of(v) - 1];
        lv.members.push(j);
        if v != 0.0 {
            lv.nonzeros += 1;
        }
    }
    let mut sparse_part = vec![0.0; x.len()];
    let mut dense_part = vec![0.0; x.len()];
    let mut dense_levels = Vec::new();
    for lv in levels.iter_mut() {
        lv.dense = lv.nonzeros > params.l;
        let target = if lv.dense { &mut dense_part } else { &mut sparse_part };
        for &j in &lv.members {
            target[j] = x[j];
        }
        if lv.dense {
            dense_levels.push(lv.index);
        }
    }
    let beta = beta_from_parts(x.len(), &sparse_part, &dense_part);
    Ok(PartitionReport { params: *params, levels, sparse_part, dense_part, dense_levels, beta })
}

fn beta_from_parts(n: usize, sparse: &[f64], dense: &[f64]) -> f64 {
    (n as f64).ln().sqrt() * norm_l2(dense) + norm_l1(sparse)
}

/// `β(x)` without materializing the report.
pub fn benchmark_beta(x: &[f64], params: &PartitionParams) -> Result<f64> {
    check_l1(x)?;
    Ok(beta_unchecked(x, params))
}

/// `β(x)` for any nonzero `x`; callers guarantee the ℓ1 normalization.
pub(crate) fn beta_unchecked(x: &[f64], params: &PartitionParams) -> f64 {
    let mut counts = vec![0usize; params.l];
    let lv: Vec<usize> = x.iter().map(|&v| params.level_of(v)).collect();
    for (&v, &k) in x.iter().zip(&lv) {
        if v != 0.0 {
            counts[k - 1] += 1;
        }
    }
    let mut sq_dense = 0.0;
    let mut l1_sparse = 0.0;
    for (&v, &k) in x.iter().zip(&lv) {
        if counts[k - 1] > params.l {
            sq_dense += v * v;
        } else {
            l1_sparse += v.abs();
        }
    }
    (x.len() as f64).ln().sqrt() * sq_dense.sqrt() + l1_sparse
}
