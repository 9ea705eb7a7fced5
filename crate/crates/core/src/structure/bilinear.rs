//! Empirical probe of `|xᵀMy|` against `√(ln n)(‖x‖₂+‖y‖₂)` and `β(x)+β(y)`.

use rand::seq::index::sample;
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::partition::{beta_unchecked, PartitionParams};
use crate::error::{Error, Result};
use crate::matrix::{dot, norm_l1, norm_l2, Matrix};
use crate::seed::{derive_subseed, rng_from_seed, Rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleFamily {
    /// Gaussian entries on a random support of random size, signed.
    SignedSparse,
    /// Nonnegative weights on a random support of random size.
    Distribution,
    OneHot,
    /// `y` from one of the other families; `x` puts equal weight on the
    /// top-`k` coordinates of `|My|` with matching signs.
    AlignedTopK,
}

impl SampleFamily {
    pub const ALL: [SampleFamily; 4] =
        [SampleFamily::SignedSparse, SampleFamily::Distribution, SampleFamily::OneHot, SampleFamily::AlignedTopK];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyMax {
    pub family: SampleFamily,
    pub samples: u64,
    pub max_l2_ratio: f64,
    pub max_beta_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BilinearProbeReport {
    pub n: usize,
    pub samples: u64,
    pub params: PartitionParams,
    /// Max of `|xᵀMy| / (√(ln n)(‖x‖₂+‖y‖₂))` over ℓ1-normalized inputs.
    pub max_l2_ratio: f64,
    /// Max of `|xᵀMy| / (β(x)+β(y))`.
    pub max_beta_ratio: f64,
    pub families: Vec<FamilyMax>,
}

fn random_support(rng: &mut Rng, n: usize) -> Vec<usize> {
    // Log-uniform support size so that both very sparse and dense vectors occur.
    let k = ((n as f64).powf(rng.random::<f64>()).round() as usize).clamp(1, n);
    sample(rng, n, k).into_vec()
}

fn l1_normalize(mut v: Vec<f64>) -> Option<Vec<f64>> {
    let s = norm_l1(&v);
    if !(s > 0.0) {
        return None;
    }
    v.iter_mut().for_each(|e| *e /= s);
    Some(v)
}

fn draw_basic(rng: &mut Rng, n: usize, family: SampleFamily) -> Vec<f64> {
    loop {
        let mut v = vec![0.0; n];
        match family {
            SampleFamily::OneHot => v[rng.random_range(0..n)] = 1.0,
            SampleFamily::Distribution => {
                for j in random_support(rng, n) {
                    v[j] = rng.random::<f64>();
                }
            }
            _ => {
                for j in random_support(rng, n) {
                    v[j] = StandardNormal.sample(rng);
                }
            }
        }
        if let Some(v) = l1_normalize(v) {
            return v;
        }
    }
}

fn aligned(rng: &mut Rng, my: &[f64]) -> Vec<f64> {
    let n = my.len();
    let k = ((n as f64).powf(rng.random::<f64>()).round() as usize).clamp(1, n);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| my[b].abs().total_cmp(&my[a].abs()).then(a.cmp(&b)));
    let mut x = vec![0.0; n];
    for &j in &order[..k] {
        x[j] = if my[j] < 0.0 { -1.0 } else { 1.0 };
    }
    l1_normalize(x).expect("k ≥ 1 nonzeros")
}

/// `My` using only the nonzero coordinates of `y`; `mt` is `Mᵀ`.
fn apply(mt: &Matrix, y: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; mt.cols()];
    for (j, &w) in y.iter().enumerate() {
        if w != 0.0 {
            for (o, &m) in out.iter_mut().zip(mt.row(j)) {
                *o += w * m;
            }
        }
    }
    out
}

/// Samples `(x, y)` pairs; sample `i` uses family `i mod 4` and a generator
/// seeded from `(seed, i)`.
pub fn bilinear_concentration_probe(
    m: &Matrix,
    sample_count: u64,
    seed: u64,
    params: &PartitionParams,
) -> Result<BilinearProbeReport> {
    let n = m.rows();
    if n == 0 || m.cols() != n {
        return Err(Error::Dimension(format!("probe needs a nonempty square matrix, got {}×{}", m.rows(), m.cols())));
    }
    let mt = m.transpose();
    let sqrt_log = (n as f64).ln().sqrt();
    let mut fams: Vec<FamilyMax> = SampleFamily::ALL
        .iter()
        .map(|&family| FamilyMax { family, samples: 0, max_l2_ratio: 0.0, max_beta_ratio: 0.0 })
        .collect();
    for i in 0..sample_count {
        let mut rng = rng_from_seed(derive_subseed(seed, "bilinear", i));
        let slot = (i % 4) as usize;
        let family = SampleFamily::ALL[slot];
        let (x, y, my) = if family == SampleFamily::AlignedTopK {
            let inner = SampleFamily::ALL[rng.random_range(0..3)];
            let y = draw_basic(&mut rng, n, inner);
            let my = apply(&mt, &y);
            (aligned(&mut rng, &my), y, my)
        } else {
            let y = draw_basic(&mut rng, n, family);
            let x = draw_basic(&mut rng, n, family);
            let my = apply(&mt, &y);
            (x, y, my)
        };
        let value = dot(&x, &my).abs();
        let l2 = if sqrt_log > 0.0 { value / (sqrt_log * (norm_l2(&x) + norm_l2(&y))) } else { 0.0 };
        let beta = value / (beta_unchecked(&x, params) + beta_unchecked(&y, params));
        let f = &mut fams[slot];
        f.samples += 1;
        f.max_l2_ratio = f.max_l2_ratio.max(l2);
        f.max_beta_ratio = f.max_beta_ratio.max(beta);
    }
    Ok(BilinearProbeReport {
        n,
        samples: sample_count,
        params: *params,
        max_l2_ratio: fams.iter().map(|f| f.max_l2_ratio).fold(0.0, f64::max),
        max_beta_ratio: fams.iter().map(|f| f.max_beta_ratio).fold(0.0, f64::max),
        families: fams,
    })
}
