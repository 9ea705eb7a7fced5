//! Collapsing reduced-game strategies onto the source game.

use crate::error::{Error, Result};
use crate::game::MixedStrategy;
use crate::matrix::compensated_sum;
use crate::reduction::instance::{BlockMap, ReductionInstance};

/// Reduced-game regret above which [`decoding_defect`] warns.
pub const DECODE_EQ_CHECK_TOL: f64 = 1e-6;

/// `x̂ᵢ = Σ_{i′∈Iᵢ} x_{i′}` for both players.
pub fn decode_strategies(
    x: &MixedStrategy,
    y: &MixedStrategy,
    block_map: &BlockMap,
) -> Result<(MixedStrategy, MixedStrategy)> {
    Ok((decode_one(x, block_map)?, decode_one(y, block_map)?))
}

fn decode_one(x: &MixedStrategy, bm: &BlockMap) -> Result<MixedStrategy> {
    if x.len() != bm.n {
        return Err(Error::Dimension(format!("strategy of length {} for n = {}", x.len(), bm.n)));
    }
    let w = x.weights();
    let sums: Vec<f64> = bm.blocks().map(|r| compensated_sum(w[r].iter().copied())).collect();
    MixedStrategy::new(sums)
}

/// Largest regret of the decoded pair `(x̂, ŷ)` in the source game `(P, Q)`.
pub fn decoding_defect(inst: &ReductionInstance, x: &MixedStrategy, y: &MixedStrategy) -> Result<f64> {
    let (rr, rc) = inst.reduced.regrets(x, y)?;
    if rr.max(rc) > DECODE_EQ_CHECK_TOL {
        log::warn!("decoding a non-equilibrium: reduced regrets ({rr:e}, {rc:e})");
    }
    let (xh, yh) = decode_strategies(x, y, &inst.block_map)?;
    let (dr, dc) = inst.source.regrets(&xh, &yh)?;
    Ok(dr.max(dc))
}
