//! How many points of a cloud can a random direction squeeze into one short
//! interval, and how well can it split them into two separated groups.

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{dot, norm_l2, Matrix};
use crate::seed::{derive_subseed, rng_from_seed};

/// Split of the projections into `S₁ = {⟨gᵢ,v⟩ ≤ r}` and
/// `S₂ = {⟨gᵢ,v⟩ ≥ r + len}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapSplit {
    pub threshold: f64,
    pub s1: Vec<usize>,
    pub s2: Vec<usize>,
    /// `min S₂ − max S₁` over the projections, at least the interval length.
    pub separation: f64,
}

impl GapSplit {
    pub fn min_size(&self) -> usize {
        self.s1.len().min(self.s2.len())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeOutcome {
    pub max_fraction: f64,
    /// Left end of a densest window.
    pub window_start: f64,
    /// All projections coincide.
    pub degenerate: bool,
    pub split: Option<GapSplit>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityComparison {
    /// Assumed density bound of the projections.
    pub k: f64,
    /// `√2·K·len`.
    pub predicted: f64,
    /// Observed max fraction minus `predicted`.
    pub slack: f64,
    pub sqrt_d_over_n: f64,
    /// `max(slack, 0) / √(d/n)`.
    pub fitted_constant: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfspaceReport {
    pub n: usize,
    pub d: usize,
    pub interval_len: f64,
    pub max_fraction: f64,
    pub degenerate: bool,
    pub probes: Vec<ProbeOutcome>,
    pub density: Option<DensityComparison>,
}

/// Largest count of sorted values inside a closed window of length `len`,
/// with the window's left end.
fn densest_window(sorted: &[f64], len: f64) -> (usize, f64) {
    let mut best = (0, sorted.first().copied().unwrap_or(0.0));
    let mut hi = 0;
    for lo in 0..sorted.len() {
        while hi < sorted.len() && sorted[hi] <= sorted[lo] + len {
            hi += 1;
        }
        if hi - lo > best.0 {
            best = (hi - lo, sorted[lo]);
        }
    }
    best
}

/// Best gap split over sorted `(projection, row)` pairs.
fn best_split(sorted: &[(f64, usize)], len: f64) -> Option<GapSplit> {
    let n = sorted.len();
    let mut best: Option<(usize, usize, usize)> = None;
    let mut j = 0;
    for a in 1..=n {
        // S₁ is the first `a` rows; only cut between distinct values.
        if a < n && sorted[a].0 == sorted[a - 1].0 {
            continue;
        }
        let r = sorted[a - 1].0;
        j = j.max(a);
        while j < n && sorted[j].0 < r + len {
            j += 1;
        }
        if j == n {
            break;
        }
        let size = a.min(n - j);
        if best.is_none_or(|(s, _, _)| size > s) {
            best = Some((size, a, j));
        }
    }
    best.map(|(_, a, j)| GapSplit {
        threshold: sorted[a - 1].0,
        s1: sorted[..a].iter().map(|p| p.1).collect(),
        s2: sorted[j..].iter().map(|p| p.1).collect(),
        separation: sorted[j].0 - sorted[a - 1].0,
    })
}

/// Projects the rows of `rows` (`n × d`) on `probe_count` uniform random unit
/// directions. The densest window is searched over all positions, not a
/// fixed grid. When `density_bound` is given, the observed maximum is
/// compared against `√2·K·len`.
pub fn halfspace_interval_density(
    rows: &Matrix,
    probe_count: usize,
    interval_len: f64,
    seed: u64,
    density_bound: Option<f64>,
) -> Result<HalfspaceReport> {
    let (n, d) = (rows.rows(), rows.cols());
    if n == 0 || d == 0 {
        return Err(Error::Dimension("halfspace probe needs at least one row and column".into()));
    }
    if d > n {
        return Err(Error::Dimension(format!("dimension {d} exceeds row count {n}")));
    }
    if !(interval_len >= 0.0 && interval_len.is_finite()) {
        return Err(Error::InvalidArgument(format!("interval length {interval_len}")));
    }
    let mut probes = Vec::with_capacity(probe_count);
    for p in 0..probe_count {
        let mut rng = rng_from_seed(derive_subseed(seed, "halfspace", p as u64));
        let v = loop {
            let v: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
            let norm = norm_l2(&v);
            if norm > 0.0 {
                break v.into_iter().map(|e| e / norm).collect::<Vec<f64>>();
            }
        };
        let mut proj: Vec<(f64, usize)> = (0..n).map(|i| (dot(rows.row(i), &v), i)).collect();
        proj.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let values: Vec<f64> = proj.iter().map(|p| p.0).collect();
        let (count, start) = densest_window(&values, interval_len);
        probes.push(ProbeOutcome {
            max_fraction: count as f64 / n as f64,
            window_start: start,
            degenerate: values[0] == values[n - 1],
            split: best_split(&proj, interval_len),
        });
    }
    let max_fraction = probes.iter().map(|p| p.max_fraction).fold(0.0, f64::max);
    let density = density_bound.map(|k| {
        let predicted = std::f64::consts::SQRT_2 * k * interval_len;
        let slack = max_fraction - predicted;
        let sqrt_d_over_n = (d as f64 / n as f64).sqrt();
        DensityComparison { k, predicted, slack, sqrt_d_over_n, fitted_constant: slack.max(0.0) / sqrt_d_over_n }
    });
    Ok(HalfspaceReport {
        n,
        d,
        interval_len,
        max_fraction,
        degenerate: probes.iter().any(|p| p.degenerate),
        probes,
        density,
    })
}
