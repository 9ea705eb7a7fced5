//! Minimax LP for zero-sum games, solved with a dense tableau simplex.
//!
//! The payoff matrix is shifted so every entry is at least 1. The column
//! player's problem is then `max 1ᵀw  s.t.  M w ≤ 1, w ≥ 0`, whose optimum
//! `t` gives value `1/t − shift`, `y = w/t`, and the row player's strategy
//! from the slack duals.

use crate::error::{Error, Result};
use crate::game::{BimatrixGame, MixedStrategy};
use crate::matrix::Matrix;

const PIVOT_TOL: f64 = 1e-12;
const OPTIMALITY_TOL: f64 = 1e-12;
/// Regret bound the returned pair must meet.
pub const LP_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSumSolution {
    pub value: f64,
    pub x: MixedStrategy,
    pub y: MixedStrategy,
    pub pivots: usize,
}

struct Tableau {
    rows: usize,
    width: usize,
    data: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.width + c]
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.width;
        let p = self.at(pr, pc);
        for v in &mut self.data[pr * w..(pr + 1) * w] {
            *v /= p;
        }
        let pivot_row: Vec<f64> = self.data[pr * w..(pr + 1) * w].to_vec();
        for r in 0..=self.rows {
            if r == pr {
                continue;
            }
            let f = self.data[r * w + pc];
            if f == 0.0 {
                continue;
            }
            for (v, &pv) in self.data[r * w..(r + 1) * w].iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
            self.data[r * w + pc] = 0.0;
        }
        self.basis[pr] = pc;
    }
}

/// Solves the zero-sum game with row payoff `c` (row player maximizes).
pub fn solve_zero_sum(c: &Matrix) -> Result<ZeroSumSolution> {
    let (n, m) = (c.rows(), c.cols());
    if n == 0 || m == 0 {
        return Err(Error::Dimension("empty payoff matrix".into()));
    }
    if !c.is_finite() {
        return Err(Error::InvalidArgument("payoffs must be finite".into()));
    }
    let shift = 1.0 - c.min();
    // columns: w_0..w_{m-1}, slack_0..slack_{n-1}, rhs; row n is the objective
    let width = m + n + 1;
    let mut data = vec![0.0; (n + 1) * width];
    for i in 0..n {
        for j in 0..m {
            data[i * width + j] = c[(i, j)] + shift;
        }
        data[i * width + m + i] = 1.0;
        data[i * width + m + n] = 1.0;
    }
    for j in 0..m {
        data[n * width + j] = -1.0;
    }
    let mut t = Tableau { rows: n, width, data, basis: (m..m + n).collect() };

    let max_pivots = 50 * (n + m) + 1000;
    let mut pivots = 0;
    let mut degenerate_run = 0;
    let mut bland = false;
    loop {
        let obj = n;
        let entering = if bland {
            (0..m + n).find(|&j| t.at(obj, j) < -OPTIMALITY_TOL)
        } else {
            let (j, v) = (0..m + n)
                .map(|j| (j, t.at(obj, j)))
                .fold((usize::MAX, -OPTIMALITY_TOL), |b, c| if c.1 < b.1 { c } else { b });
            (v < -OPTIMALITY_TOL).then_some(j)
        };
        let Some(pc) = entering else { break };

        let mut leave: Option<(usize, f64)> = None;
        for r in 0..n {
            let a = t.at(r, pc);
            if a > PIVOT_TOL {
                let ratio = t.at(r, width - 1) / a;
                leave = match leave {
                    None => Some((r, ratio)),
                    Some((br, bv)) => {
                        if ratio < bv - 1e-14 || (ratio <= bv + 1e-14 && t.basis[r] < t.basis[br]) {
                            Some((r, ratio))
                        } else {
                            Some((br, bv))
                        }
                    }
                };
            }
        }
        // Bounded: the feasible region lies in w ≥ 0, M w ≤ 1 with M > 0.
        let Some((pr, ratio)) = leave else {
            return Err(Error::Lp(format!(
                "unbounded ratio test at pivot {pivots}; shift {shift}, column {pc}"
            )));
        };
        if ratio.abs() < 1e-14 {
            degenerate_run += 1;
            if degenerate_run > n + m {
                bland = true;
            }
        } else {
            degenerate_run = 0;
        }
        t.pivot(pr, pc);
        pivots += 1;
        if pivots > max_pivots {
            return Err(Error::Lp(format!(
                "no convergence after {pivots} pivots (matrix {n}x{m}, shift {shift})"
            )));
        }
    }

    let mut w = vec![0.0; m];
    for (r, &bv) in t.basis.iter().enumerate() {
        if bv < m {
            w[bv] = t.at(r, width - 1);
        }
    }
    let total: f64 = w.iter().sum();
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::Lp(format!("degenerate optimum 1ᵀw = {total} (shift {shift})")));
    }
    let duals: Vec<f64> = (0..n).map(|i| t.at(n, m + i)).collect();
    let dual_total: f64 = duals.iter().sum();

    let y = normalize(w.iter().map(|v| v.max(0.0)).collect())
        .map_err(|e| Error::Lp(format!("column strategy invalid: {e}")))?;
    let x = normalize(duals.iter().map(|v| v.max(0.0)).collect())
        .map_err(|e| Error::Lp(format!("row strategy invalid (dual sum {dual_total}): {e}")))?;

    let game = BimatrixGame::zero_sum(c.clone())?;
    let (rr, rc) = game.regrets(&x, &y)?;
    if rr > LP_TOLERANCE || rc > LP_TOLERANCE {
        return Err(Error::Lp(format!(
            "optimum fails verification: regrets ({rr:e}, {rc:e}), 1ᵀw = {total}, shift {shift}, \
             pivots {pivots}"
        )));
    }
    let value = c.bilinear(x.weights(), y.weights());
    Ok(ZeroSumSolution { value, x, y, pivots })
}

fn normalize(v: Vec<f64>) -> Result<MixedStrategy> {
    let s: f64 = v.iter().sum();
    MixedStrategy::new(v.into_iter().map(|w| w / s).collect())
}
