//! Reduced-game construction.
//!
//! ```text
//! A = P⊗J_ℓ + Z₀ + Z₁ + A_ε
//! B = Q⊗J_ℓ − Z₀ − Z₁ + B_ε
//! ```
//!
//! `Z₀` is Rademacher, `Z₁` uniform on `[-1, 1]`, `A_ε`, `B_ε` i.i.d. from the
//! noise spec. The two zero-sum gadgets cancel in `A + B`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::BimatrixGame;
use crate::matrix::Matrix;
use crate::reduction::noise::{difference_parts, sample_noise_matrix, symmetrize, NoiseSpec};
use crate::seed::derive_subseed;

/// Partition of `0..n` into `b` contiguous blocks of length `ell`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockMap {
    pub n: usize,
    pub b: usize,
    pub ell: usize,
}

impl BlockMap {
    pub fn new(b: usize, ell: usize) -> Result<Self> {
        if b == 0 || ell == 0 {
            return Err(Error::InvalidArgument(format!("block count {b} and length {ell} must be ≥ 1")));
        }
        Ok(Self { n: b * ell, b, ell })
    }

    #[inline]
    pub fn block_of(&self, index: usize) -> usize {
        index / self.ell
    }

    pub fn block(&self, block: usize) -> std::ops::Range<usize> {
        block * self.ell..(block + 1) * self.ell
    }

    pub fn blocks(&self) -> impl Iterator<Item = std::ops::Range<usize>> + '_ {
        (0..self.b).map(|i| self.block(i))
    }
}

/// `P⊗J_ℓ`: entry `(r, c)` is `P[r/ℓ, c/ℓ]`.
pub fn tensor_with_ones(p: &Matrix, ell: usize) -> Result<Matrix> {
    if ell == 0 {
        return Err(Error::InvalidArgument("block length must be ≥ 1".into()));
    }
    Ok(Matrix::from_fn(p.rows() * ell, p.cols() * ell, |r, c| p[(r / ell, c / ell)]))
}

/// Which gadgets enter the construction. Disabled gadgets are all-zero;
/// this exists for ablations and oracle tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GadgetMask {
    pub z0: bool,
    pub z1: bool,
    pub a_eps: bool,
    pub b_eps: bool,
}

impl Default for GadgetMask {
    fn default() -> Self {
        Self { z0: true, z1: true, a_eps: true, b_eps: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReductionParams {
    pub ell: usize,
    /// Smoothing distribution. In general-X mode this is `X` itself and the
    /// instance noise is `X − X′`.
    pub noise: NoiseSpec,
    pub master_seed: u64,
    #[serde(default)]
    pub general_x: bool,
    /// Divide the whole construction by 3.
    #[serde(default)]
    pub scale_third: bool,
    /// Multiplier applied to `P` and `Q` before tensoring.
    #[serde(default = "one")]
    pub signal_scale: f64,
    #[serde(default)]
    pub mask: GadgetMask,
}

fn one() -> f64 {
    1.0
}

impl ReductionParams {
    pub fn new(ell: usize, noise: NoiseSpec, master_seed: u64) -> Self {
        Self {
            ell,
            noise,
            master_seed,
            general_x: false,
            scale_third: false,
            signal_scale: 1.0,
            mask: GadgetMask::default(),
        }
    }

    pub fn scale(&self) -> f64 {
        if self.scale_third {
            1.0 / 3.0
        } else {
            1.0
        }
    }

    /// Distribution of `A_ε`, `B_ε`.
    pub fn effective_noise(&self) -> NoiseSpec {
        if self.general_x {
            symmetrize(&self.noise)
        } else {
            self.noise.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetSeeds {
    pub master: u64,
    pub z0: u64,
    pub z1: u64,
    pub a_eps: u64,
    pub b_eps: u64,
}

impl GadgetSeeds {
    pub fn derive(master: u64) -> Self {
        Self {
            master,
            z0: derive_subseed(master, "Z0", 0),
            z1: derive_subseed(master, "Z1", 0),
            a_eps: derive_subseed(master, "A_eps", 0),
            b_eps: derive_subseed(master, "B_eps", 0),
        }
    }
}

/// Noise realizations, before the optional 1/3 scaling.
#[derive(Debug, Clone, PartialEq)]
pub struct Gadgets {
    pub z0: Matrix,
    pub z1: Matrix,
    pub a_eps: Matrix,
    pub b_eps: Matrix,
}

/// The X-smoothed form `A = W_A + N_A`, `B = W_B + N_B` with fresh
/// `N ~ X` and the subtracted copy `A′_X` folded into the worst case part.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothedForm {
    pub w_a: Matrix,
    pub w_b: Matrix,
    pub n_a: Matrix,
    pub n_b: Matrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionInstance {
    pub source: BimatrixGame,
    pub reduced: BimatrixGame,
    pub block_map: BlockMap,
    pub params: ReductionParams,
    pub seeds: GadgetSeeds,
    pub gadgets: Gadgets,
    pub smoothed: Option<SmoothedForm>,
}

/// Symmetric-noise construction with default options.
pub fn build_reduced_game(
    p: &Matrix,
    q: &Matrix,
    ell: usize,
    noise: NoiseSpec,
    master_seed: u64,
) -> Result<ReductionInstance> {
    let source = BimatrixGame::new(p.clone(), q.clone())?;
    build_with(&source, &ReductionParams::new(ell, noise, master_seed))
}

/// General-X construction: `noise` is `X`, bounded by `ε/2`.
pub fn build_general_x_game(
    p: &Matrix,
    q: &Matrix,
    ell: usize,
    x: NoiseSpec,
    master_seed: u64,
) -> Result<ReductionInstance> {
    let source = BimatrixGame::new(p.clone(), q.clone())?;
    let mut params = ReductionParams::new(ell, x, master_seed);
    params.general_x = true;
    build_with(&source, &params)
}

pub fn build_with(source: &BimatrixGame, params: &ReductionParams) -> Result<ReductionInstance> {
    let b = source.rows();
    if source.cols() != b {
        return Err(Error::Dimension(format!("source game must be square, got {b}x{}", source.cols())));
    }
    if !(params.signal_scale.is_finite()) {
        return Err(Error::InvalidArgument("signal scale must be finite".into()));
    }
    params.noise.validate()?;
    let block_map = BlockMap::new(b, params.ell)?;
    let n = block_map.n;
    let over = source.payoff_a().max_abs().max(source.payoff_b().max_abs());
    if over > 1.0 {
        log::warn!("source payoffs reach {over}, outside [-1, 1]");
    }
    let seeds = GadgetSeeds::derive(params.master_seed);
    let mask = params.mask;
    let zeros = || Matrix::zeros(n, n);

    let z0 = if mask.z0 { sample_noise_matrix(&NoiseSpec::rademacher(1.0), n, seeds.z0)? } else { zeros() };
    let z1 = if mask.z1 { sample_noise_matrix(&NoiseSpec::uniform(1.0), n, seeds.z1)? } else { zeros() };

    let signal_a = tensor_with_ones(&source.payoff_a().scale(params.signal_scale), params.ell)?;
    let signal_b = tensor_with_ones(&source.payoff_b().scale(params.signal_scale), params.ell)?;
    let gadget_a = signal_a.add(&z0)?.add(&z1)?;
    let gadget_b = signal_b.sub(&z0)?.sub(&z1)?;
    let s = params.scale();

    let (a_eps, b_eps, a, b_mat, smoothed) = if params.general_x {
        // A_Y = A_X − A′_X with the same sub-seeds as sampling diff(X) directly.
        let (a_x, a_x2) = if mask.a_eps { difference_parts(&params.noise, n, seeds.a_eps)? } else { (zeros(), zeros()) };
        let (b_x, b_x2) = if mask.b_eps { difference_parts(&params.noise, n, seeds.b_eps)? } else { (zeros(), zeros()) };
        let w_a = gadget_a.sub(&a_x2)?.scale(s);
        let w_b = gadget_b.sub(&b_x2)?.scale(s);
        let n_a = a_x.scale(s);
        let n_b = b_x.scale(s);
        let a = w_a.add(&n_a)?;
        let b_mat = w_b.add(&n_b)?;
        let a_eps = a_x.sub(&a_x2)?;
        let b_eps = b_x.sub(&b_x2)?;
        (a_eps, b_eps, a, b_mat, Some(SmoothedForm { w_a, w_b, n_a, n_b }))
    } else {
        let a_eps = if mask.a_eps { sample_noise_matrix(&params.noise, n, seeds.a_eps)? } else { zeros() };
        let b_eps = if mask.b_eps { sample_noise_matrix(&params.noise, n, seeds.b_eps)? } else { zeros() };
        let a = gadget_a.add(&a_eps)?.scale(s);
        let b_mat = gadget_b.add(&b_eps)?.scale(s);
        (a_eps, b_eps, a, b_mat, None)
    };

    Ok(ReductionInstance {
        source: source.clone(),
        reduced: BimatrixGame::new(a, b_mat)?,
        block_map,
        params: params.clone(),
        seeds,
        gadgets: Gadgets { z0, z1, a_eps, b_eps },
        smoothed,
    })
}

impl ReductionInstance {
    /// Rebuilds from the source and parameters alone.
    pub fn regenerate(&self) -> Result<Self> {
        build_with(&self.source, &self.params)
    }

    /// Max-abs entry of `A + B − s·((P′+Q′)⊗J + A_ε + B_ε)`, where `P′, Q′`
    /// are the signal-scaled sources and `s` the global scale.
    pub fn gadget_residual(&self) -> Result<f64> {
        let ell = self.params.ell;
        let sig = self.params.signal_scale;
        let pq = self.source.payoff_a().scale(sig).add(&self.source.payoff_b().scale(sig))?;
        let expected = tensor_with_ones(&pq, ell)?
            .add(&self.gadgets.a_eps)?
            .add(&self.gadgets.b_eps)?
            .scale(self.params.scale());
        Ok(self.reduced.payoff_a().add(self.reduced.payoff_b())?.sub(&expected)?.max_abs())
    }

    /// `Z₀ + Z₁ + A_ε` (unscaled): everything in `A` except the signal.
    pub fn row_noise(&self) -> Result<Matrix> {
        self.gadgets.z0.add(&self.gadgets.z1)?.add(&self.gadgets.a_eps)
    }

    /// `−Z₀ − Z₁ + B_ε` (unscaled).
    pub fn col_noise(&self) -> Result<Matrix> {
        self.gadgets.b_eps.sub(&self.gadgets.z0)?.sub(&self.gadgets.z1)
    }
}
