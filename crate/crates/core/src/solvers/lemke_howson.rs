//! Lemke–Howson complementary pivoting with a lexicographic ratio test.
//!
//! Labels `0..n` belong to row strategies, `n..n+m` to column strategies.
//! Each tableau holds the following system, with columns tracked by label:
//!
//! * P (row player, `m` rows): `Bᵀx + s = 1`, `x_i` has label `i`, `s_j` label `n+j`.
//! * Q (column player, `n` rows): `A y + r = 1`, `r_i` has label `i`, `y_j` label `n+j`.
//!
//! Payoffs are shifted to be at least 1 so both polytopes are bounded; the
//! shift does not change best responses and is not visible in the output.

use std::collections::HashSet;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::game::{BimatrixGame, EquilibriumRecord, MixedStrategy};
use crate::linalg::solve_square;

pub const DEFAULT_PIVOT_LIMIT: usize = 1_000_000;
/// Regret bound for a returned equilibrium.
pub const LH_TOLERANCE: f64 = 1e-8;

const PIVOT_EPS: f64 = 1e-12;
const LEX_EPS: f64 = 1e-11;

#[derive(Debug, Clone)]
pub struct LemkeHowsonOptions {
    pub pivot_limit: usize,
    pub deadline: Option<Instant>,
}

impl Default for LemkeHowsonOptions {
    fn default() -> Self {
        Self { pivot_limit: DEFAULT_PIVOT_LIMIT, deadline: None }
    }
}

#[derive(Debug, Clone)]
pub struct LemkeHowsonOutcome {
    pub record: EquilibriumRecord,
    pub pivots: usize,
    /// A lexicographic tie-break was needed somewhere on the path.
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy)]
enum Place {
    Basic(usize),
    Nonbasic(usize),
}

/// Tableau in compact form: only nonbasic columns are stored, since basic
/// columns are unit vectors.
struct Tableau {
    rows: usize,
    /// Nonbasic columns followed by the right-hand side.
    width: usize,
    data: Vec<f64>,
    /// Label of the basic variable in each row.
    basis: Vec<usize>,
    /// Label of each stored column.
    nonbasic: Vec<usize>,
    place: Vec<Place>,
    /// Labels of the initial (slack) basis, used for lexicographic ties.
    slack_labels: Vec<usize>,
}

impl Tableau {
    fn new(labels: usize, basis: Vec<usize>, nonbasic: Vec<usize>, entry: impl Fn(usize, usize) -> f64) -> Self {
        let rows = basis.len();
        let width = nonbasic.len() + 1;
        let mut data = vec![1.0; rows * width];
        for r in 0..rows {
            for c in 0..nonbasic.len() {
                data[r * width + c] = entry(r, c);
            }
        }
        let mut place = vec![Place::Basic(0); labels];
        for (r, &l) in basis.iter().enumerate() {
            place[l] = Place::Basic(r);
        }
        for (c, &l) in nonbasic.iter().enumerate() {
            place[l] = Place::Nonbasic(c);
        }
        Self { rows, width, data, slack_labels: basis.clone(), basis, nonbasic, place }
    }

    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.width + c]
    }

    /// Entry of row `r` in the full-tableau column of `label`.
    fn column_entry(&self, r: usize, label: usize) -> f64 {
        match self.place[label] {
            Place::Nonbasic(c) => self.at(r, c),
            Place::Basic(row) => f64::from(u8::from(row == r)),
        }
    }

    /// Lexicographic minimum-ratio row for entering label `label`.
    fn ratio_test(&self, label: usize, degenerate: &mut bool) -> Result<usize> {
        let Place::Nonbasic(col) = self.place[label] else {
            return Err(Error::InvalidEquilibrium(format!("entering label {label} is already basic")));
        };
        let rhs = self.width - 1;
        let mut candidates: Vec<usize> = (0..self.rows).filter(|&r| self.at(r, col) > PIVOT_EPS).collect();
        if candidates.is_empty() {
            return Err(Error::InvalidEquilibrium(format!("unbounded ray entering label {label}")));
        }
        let best_by = |cands: &mut Vec<usize>, value: &dyn Fn(usize) -> f64| {
            let ratio = |r: usize| value(r) / self.at(r, col);
            let best = cands.iter().map(|&r| ratio(r)).fold(f64::INFINITY, f64::min);
            let scale = best.abs().max(1.0);
            cands.retain(|&r| ratio(r) <= best + LEX_EPS * scale);
        };
        // The lexicographic key is the right-hand side, then the columns of
        // the initial basis in order.
        best_by(&mut candidates, &|r| self.at(r, rhs));
        if candidates.len() == 1 {
            return Ok(candidates[0]);
        }
        *degenerate = true;
        for &key in &self.slack_labels {
            best_by(&mut candidates, &|r| self.column_entry(r, key));
            if candidates.len() == 1 {
                return Ok(candidates[0]);
            }
        }
        // Rows of B⁻¹ are linearly independent, so exact ties cannot survive;
        // numerically, take the smallest basic label.
        Ok(candidates.into_iter().min_by_key(|&r| self.basis[r]).expect("non-empty"))
    }

    /// Exchanges the basic variable of row `pr` with the nonbasic `label`;
    /// returns the leaving label.
    fn pivot(&mut self, pr: usize, label: usize) -> usize {
        let Place::Nonbasic(pc) = self.place[label] else { unreachable!("ratio test checked the label") };
        let w = self.width;
        let p = self.at(pr, pc);
        let (before, rest) = self.data.split_at_mut(pr * w);
        let (pivot_row, after) = rest.split_at_mut(w);
        for v in pivot_row.iter_mut() {
            *v /= p;
        }
        pivot_row[pc] = 1.0 / p;
        for row in before.chunks_exact_mut(w).chain(after.chunks_exact_mut(w)) {
            let f = row[pc];
            if f == 0.0 {
                continue;
            }
            for (v, &pv) in row.iter_mut().zip(pivot_row.iter()) {
                *v -= f * pv;
            }
            row[pc] = -f * pivot_row[pc];
        }
        let leaving = std::mem::replace(&mut self.basis[pr], label);
        self.nonbasic[pc] = leaving;
        self.place[label] = Place::Basic(pr);
        self.place[leaving] = Place::Nonbasic(pc);
        leaving
    }

    /// Values of the basic variables whose labels fall in `range`, indexed
    /// from the start of the range.
    fn basic_values(&self, range: std::ops::Range<usize>) -> Vec<f64> {
        let mut out = vec![0.0; range.len()];
        for (r, &lab) in self.basis.iter().enumerate() {
            if range.contains(&lab) {
                out[lab - range.start] = self.at(r, self.width - 1).max(0.0);
            }
        }
        out
    }
}

pub fn lemke_howson(game: &BimatrixGame, initial_label: usize) -> Result<EquilibriumRecord> {
    lemke_howson_with(game, initial_label, &LemkeHowsonOptions::default()).map(|o| o.record)
}

pub fn lemke_howson_with(
    game: &BimatrixGame,
    initial_label: usize,
    opts: &LemkeHowsonOptions,
) -> Result<LemkeHowsonOutcome> {
    let (n, m) = (game.rows(), game.cols());
    let labels = n + m;
    if initial_label >= labels {
        return Err(Error::InvalidArgument(format!(
            "initial label {initial_label} out of range 0..{labels}"
        )));
    }
    let a = game.payoff_a();
    let b = game.payoff_b();
    let shift_a = 1.0 - a.min();
    let shift_b = 1.0 - b.min();
    let mut p = Tableau::new(labels, (n..labels).collect(), (0..n).collect(), |j, i| b[(i, j)] + shift_b);
    let mut q = Tableau::new(labels, (0..n).collect(), (n..labels).collect(), |i, j| a[(i, j)] + shift_a);

    let mut degenerate = false;
    let mut seen: HashSet<(bool, Vec<usize>, Vec<usize>)> = HashSet::new();
    let mut entering = initial_label;
    let mut in_p = initial_label < n;
    let mut pivots = 0usize;
    loop {
        let tab = if in_p { &mut p } else { &mut q };
        let row = tab.ratio_test(entering, &mut degenerate)?;
        let leaving = tab.pivot(row, entering);
        pivots += 1;
        if leaving == initial_label {
            break;
        }
        if pivots >= opts.pivot_limit {
            return Err(Error::PivotLimit { limit: opts.pivot_limit, pivots });
        }
        if let Some(d) = opts.deadline {
            if pivots.is_multiple_of(16) && Instant::now() >= d {
                return Err(Error::Timeout);
            }
        }
        if degenerate {
            let mut bp = p.basis.clone();
            let mut bq = q.basis.clone();
            bp.sort_unstable();
            bq.sort_unstable();
            if !seen.insert((in_p, bp, bq)) {
                return Err(Error::Cycling(pivots));
            }
        }
        entering = leaving;
        in_p = !in_p;
    }

    let x_raw = p.basic_values(0..n);
    let y_raw = q.basic_values(n..labels);
    let record = finish(game, &x_raw, &y_raw)?;
    Ok(LemkeHowsonOutcome { record, pivots, degenerate })
}

/// Normalizes the tableau solution, then re-solves the indifference system
/// on its support; keeps whichever profile has the smaller regret.
fn finish(game: &BimatrixGame, x_raw: &[f64], y_raw: &[f64]) -> Result<EquilibriumRecord> {
    let raw = build_record(game, x_raw, y_raw)?;
    let polished = polish(game, &raw);
    let best = match polished {
        Some(p) if p.max_regret() <= raw.max_regret() => p,
        _ => raw,
    };
    if best.regret_row > LH_TOLERANCE || best.regret_col > LH_TOLERANCE {
        return Err(Error::InvalidEquilibrium(format!(
            "Lemke-Howson endpoint has regrets ({:e}, {:e})",
            best.regret_row, best.regret_col
        )));
    }
    Ok(best)
}

fn build_record(game: &BimatrixGame, x: &[f64], y: &[f64]) -> Result<EquilibriumRecord> {
    let sx: f64 = x.iter().sum();
    let sy: f64 = y.iter().sum();
    if !(sx > 0.0 && sy > 0.0) {
        return Err(Error::InvalidEquilibrium("empty endpoint strategy".into()));
    }
    let x = MixedStrategy::new(x.iter().map(|v| v / sx).collect())?;
    let y = MixedStrategy::new(y.iter().map(|v| v / sy).collect())?;
    EquilibriumRecord::new(game, x, y)
}

/// Solves `A[S,T] y = v·1, 1ᵀy = 1` and `xᵀB[S,T] = u·1, 1ᵀx = 1` on the
/// record's supports. Only square supports are handled.
pub(crate) fn polish(game: &BimatrixGame, rec: &EquilibriumRecord) -> Option<EquilibriumRecord> {
    let s = rec.x.support();
    let t = rec.y.support();
    if s.len() != t.len() || s.is_empty() {
        return None;
    }
    let y_t = indifference_solve(s.len(), |r, c| game.payoff_a()[(s[r], t[c])])?;
    let x_s = indifference_solve(s.len(), |r, c| game.payoff_b()[(s[c], t[r])])?;
    let mut x = vec![0.0; game.rows()];
    let mut y = vec![0.0; game.cols()];
    for (k, &i) in s.iter().enumerate() {
        x[i] = x_s[k];
    }
    for (k, &j) in t.iter().enumerate() {
        y[j] = y_t[k];
    }
    if x.iter().chain(&y).any(|&v| v < -1e-12) {
        return None;
    }
    let x = MixedStrategy::new(x).ok()?;
    let y = MixedStrategy::new(y).ok()?;
    EquilibriumRecord::new(game, x, y).ok()
}

/// Solves `M z = v·1, 1ᵀz = 1` for a `k×k` matrix given entrywise; returns `z`.
pub(crate) fn indifference_solve(k: usize, entry: impl Fn(usize, usize) -> f64) -> Option<Vec<f64>> {
    let dim = k + 1;
    let mut a = vec![0.0; dim * dim];
    let mut rhs = vec![0.0; dim];
    for r in 0..k {
        for c in 0..k {
            a[r * dim + c] = entry(r, c);
        }
        a[r * dim + k] = -1.0;
    }
    for c in 0..k {
        a[k * dim + c] = 1.0;
    }
    rhs[k] = 1.0;
    let mut z = solve_square(a, rhs)?;
    z.truncate(k);
    Some(z)
}
