//! Exhaustive support enumeration.
//!
//! For every candidate support pair `(S, T)` the indifference conditions
//! `(eᵢ − e_{i₀})ᵀ A[S,T] y = 0`, `1ᵀy = 1` (and the mirrored system for `x`
//! with `B`) are solved; solutions that are distributions with zero regret
//! in the full game are kept. With continuous random payoffs each pair
//! carries at most one equilibrium and only `|S| = |T|` pairs can succeed.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{BimatrixGame, EquilibriumRecord, MixedStrategy, DEFAULT_SUPPORT_TOL};
use crate::linalg::least_squares;
use crate::solvers::lemke_howson::indifference_solve;
use crate::solvers::{SolverMethod, SolverReport, DEDUP_TOL, SOLVER_TOL};

/// Residual bound for accepting a non-square indifference system as consistent.
const CONSISTENCY_TOL: f64 = 1e-9;
/// Largest game accepted by [`only_support_sizes_equal_check`].
pub const MAX_UNEQUAL_CHECK_SIZE: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SupportPair {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

impl SupportPair {
    pub fn new(rows: Vec<usize>, cols: Vec<usize>) -> Result<Self> {
        if rows.is_empty() || cols.is_empty() {
            return Err(Error::InvalidArgument("support sets must be nonempty".into()));
        }
        Ok(Self { rows, cols })
    }
}

#[derive(Debug, Clone, Default)]
pub struct SupportEnumOptions {
    /// Also examine pairs with `|S| ≠ |T|`.
    pub include_unequal: bool,
}

#[derive(Debug, Clone)]
struct Candidate {
    pair: SupportPair,
    record: Option<EquilibriumRecord>,
    singular: bool,
    /// Unequal-size pair whose overdetermined side was consistent.
    degenerate: bool,
}

pub fn support_enumeration(game: &BimatrixGame, max_support: usize) -> Result<SolverReport> {
    support_enumeration_with(game, max_support, &SupportEnumOptions::default())
}

pub fn support_enumeration_with(
    game: &BimatrixGame,
    max_support: usize,
    opts: &SupportEnumOptions,
) -> Result<SolverReport> {
    let (n, m) = (game.rows(), game.cols());
    if max_support == 0 || max_support > n.min(m) {
        return Err(Error::InvalidArgument(format!(
            "max_support {max_support} must lie in 1..={}",
            n.min(m)
        )));
    }
    // Unequal pairs are bounded by max_support on both sides, except that a
    // full enumeration (max_support = min(n, m)) covers every size.
    let full = max_support == n.min(m);
    let (row_cap, col_cap) = if full { (n, m) } else { (max_support, max_support) };
    let mut pairs_by_size: Vec<(usize, usize)> = Vec::new();
    for ks in 1..=row_cap {
        for kt in 1..=col_cap {
            let equal = ks == kt && ks <= max_support;
            if equal || (opts.include_unequal && ks != kt) {
                pairs_by_size.push((ks, kt));
            }
        }
    }
    pairs_by_size.sort_by_key(|&(ks, kt)| (ks.max(kt), ks, kt));

    let mut candidates: Vec<Candidate> = Vec::new();
    for (ks, kt) in pairs_by_size {
        let row_sets = subsets(n, ks);
        let col_sets = subsets(m, kt);
        let batch: Vec<Candidate> = row_sets
            .par_iter()
            .flat_map_iter(|s| col_sets.iter().map(move |t| examine(game, s, t)))
            .collect();
        candidates.extend(batch);
    }
    let examined = candidates.len();
    let skipped_singular = candidates.iter().filter(|c| c.singular).count();
    let degenerate = candidates.iter().any(|c| c.degenerate);

    let mut equilibria: Vec<EquilibriumRecord> = Vec::new();
    let mut supports: Vec<SupportPair> = Vec::new();
    for c in candidates {
        if let Some(rec) = c.record {
            if equilibria.iter().all(|e| e.distance(&rec) > DEDUP_TOL) {
                equilibria.push(rec);
                supports.push(c.pair);
            }
        }
    }
    Ok(SolverReport {
        equilibria,
        supports,
        method: SolverMethod::SupportEnumeration,
        work: examined,
        degenerate,
        skipped_singular,
    })
}

fn examine(game: &BimatrixGame, s: &[usize], t: &[usize]) -> Candidate {
    let pair = SupportPair { rows: s.to_vec(), cols: t.to_vec() };
    let mut cand = Candidate { pair, record: None, singular: false, degenerate: false };
    let solved = if s.len() == t.len() {
        let k = s.len();
        let y = indifference_solve(k, |r, c| game.payoff_a()[(s[r], t[c])]);
        let x = indifference_solve(k, |r, c| game.payoff_b()[(s[c], t[r])]);
        match (x, y) {
            (Some(x), Some(y)) => Some((x, y)),
            _ => {
                cand.singular = true;
                None
            }
        }
    } else {
        let y = rectangular_indifference(t.len(), s.len(), |r, c| game.payoff_a()[(s[r], t[c])]);
        let x = rectangular_indifference(s.len(), t.len(), |r, c| game.payoff_b()[(s[c], t[r])]);
        match (x, y) {
            (Some(x), Some(y)) => {
                cand.degenerate = true;
                Some((x, y))
            }
            _ => None,
        }
    };
    let Some((xs, yt)) = solved else { return cand };
    // exact support: every weight on S and T must be strictly positive
    if xs.iter().chain(&yt).any(|&w| w <= DEFAULT_SUPPORT_TOL) {
        return cand;
    }
    let mut x = vec![0.0; game.rows()];
    let mut y = vec![0.0; game.cols()];
    for (k, &i) in s.iter().enumerate() {
        x[i] = xs[k];
    }
    for (k, &j) in t.iter().enumerate() {
        y[j] = yt[k];
    }
    let (Ok(x), Ok(y)) = (MixedStrategy::new(x), MixedStrategy::new(y)) else { return cand };
    if let Ok(rec) = EquilibriumRecord::new(game, x, y) {
        if rec.regret_row <= SOLVER_TOL && rec.regret_col <= SOLVER_TOL {
            cand.record = Some(rec);
        }
    }
    cand
}

/// Solves `M z = v·1, 1ᵀz = 1` with `M` of shape `eqs × unknowns`; returns
/// the minimum-norm `z` only when the system is consistent.
fn rectangular_indifference(
    unknowns: usize,
    eqs: usize,
    entry: impl Fn(usize, usize) -> f64,
) -> Option<Vec<f64>> {
    let cols = unknowns + 1;
    let rows = eqs + 1;
    let mut a = vec![0.0; rows * cols];
    let mut rhs = vec![0.0; rows];
    for r in 0..eqs {
        for c in 0..unknowns {
            a[r * cols + c] = entry(r, c);
        }
        a[r * cols + unknowns] = -1.0;
    }
    for c in 0..unknowns {
        a[eqs * cols + c] = 1.0;
    }
    rhs[eqs] = 1.0;
    let (mut z, resid) = least_squares(&a, rows, cols, &rhs)?;
    if resid > CONSISTENCY_TOL {
        return None;
    }
    z.truncate(unknowns);
    Some(z)
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k == 0 || k > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let mut i = k;
        while i > 0 && cur[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        cur[i - 1] += 1;
        for j in i..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnequalSupportReport {
    /// No equilibrium with `|S| ≠ |T|` was found.
    pub holds: bool,
    /// Some unequal pair had a consistent overdetermined system.
    pub degenerate: bool,
    pub pairs_examined: usize,
}

/// True iff no support pair with `|S| ≠ |T|` carries an equilibrium.
pub fn only_support_sizes_equal_check(game: &BimatrixGame) -> Result<bool> {
    only_support_sizes_equal_report(game).map(|r| r.holds)
}

pub fn only_support_sizes_equal_report(game: &BimatrixGame) -> Result<UnequalSupportReport> {
    let (n, m) = (game.rows(), game.cols());
    if n.max(m) > MAX_UNEQUAL_CHECK_SIZE {
        return Err(Error::InvalidArgument(format!(
            "game {n}x{m} too large for full support enumeration (max {MAX_UNEQUAL_CHECK_SIZE})"
        )));
    }
    let opts = SupportEnumOptions { include_unequal: true };
    let report = support_enumeration_with(game, n.min(m), &opts)?;
    let holds = report.supports.iter().all(|p| p.rows.len() == p.cols.len());
    Ok(UnequalSupportReport { holds, degenerate: report.degenerate, pairs_examined: report.work })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;

    fn game(a: &[&[f64]], b: &[&[f64]]) -> BimatrixGame {
        BimatrixGame::new(Matrix::from_rows(a).unwrap(), Matrix::from_rows(b).unwrap()).unwrap()
    }

    #[test]
    fn subsets_enumerates_binomial_count() {
        assert_eq!(subsets(5, 2).len(), 10);
        assert_eq!(subsets(4, 4), vec![vec![0, 1, 2, 3]]);
        assert_eq!(subsets(3, 1), vec![vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn battle_of_the_sexes_has_three_equilibria() {
        let g = game(&[&[2.0, 0.0], &[0.0, 1.0]], &[&[1.0, 0.0], &[0.0, 2.0]]);
        let rep = support_enumeration(&g, 2).unwrap();
        assert_eq!(rep.equilibria.len(), 3);
        let mixed = rep.equilibria.iter().find(|e| e.support_sizes == (2, 2)).unwrap();
        // Column indifference: x1 = 2 x2; row indifference: 2 y1 = y2.
        assert!((mixed.x.weights()[0] - 2.0 / 3.0).abs() < 1e-12);
        assert!((mixed.y.weights()[0] - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn matching_pennies_unique() {
        let g = game(&[&[1.0, -1.0], &[-1.0, 1.0]], &[&[-1.0, 1.0], &[1.0, -1.0]]);
        let rep = support_enumeration(&g, 2).unwrap();
        assert_eq!(rep.equilibria.len(), 1);
        assert!(only_support_sizes_equal_check(&g).unwrap());
    }

    #[test]
    fn dominance_game_single_pure() {
        let g = game(&[&[3.0, 0.0], &[5.0, 1.0]], &[&[3.0, 5.0], &[0.0, 1.0]]);
        let rep = support_enumeration(&g, 2).unwrap();
        assert_eq!(rep.equilibria.len(), 1);
        assert_eq!(rep.supports[0], SupportPair { rows: vec![1], cols: vec![1] });
    }

    #[test]
    fn zero_game_is_degenerate() {
        let g = BimatrixGame::new(Matrix::zeros(2, 2), Matrix::zeros(2, 2)).unwrap();
        let rep = only_support_sizes_equal_report(&g).unwrap();
        assert!(rep.degenerate);
        assert!(!rep.holds);
    }

    #[test]
    fn bad_max_support_rejected() {
        let g = game(&[&[1.0]], &[&[1.0]]);
        assert!(support_enumeration(&g, 0).is_err());
        assert!(support_enumeration(&g, 2).is_err());
        assert!(SupportPair::new(vec![], vec![0]).is_err());
    }
}
