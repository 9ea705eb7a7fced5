//! Bimatrix games, mixed strategies, regrets and equilibrium checks.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{dot, norm_l2, Matrix};

/// Weights at or below this are outside the support.
pub const DEFAULT_SUPPORT_TOL: f64 = 1e-9;
/// Largest deviation of a weight sum from 1 that is silently renormalized.
pub const RENORMALIZE_TOL: f64 = 1e-9;
/// Slack added to ε in [`is_epsilon_equilibrium`].
pub const EPS_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BimatrixGame {
    a: Matrix,
    b: Matrix,
}

impl BimatrixGame {
    pub fn new(a: Matrix, b: Matrix) -> Result<Self> {
        if a.rows() != b.rows() || a.cols() != b.cols() {
            return Err(Error::Dimension(format!(
                "payoff A is {}x{} but payoff B is {}x{}",
                a.rows(),
                a.cols(),
                b.rows(),
                b.cols()
            )));
        }
        if a.rows() == 0 || a.cols() == 0 {
            return Err(Error::Dimension("games need at least one row and column".into()));
        }
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidArgument("payoffs must be finite".into()));
        }
        Ok(Self { a, b })
    }

    /// The zero-sum game `(C, -C)`.
    pub fn zero_sum(c: Matrix) -> Result<Self> {
        let b = c.neg();
        Self::new(c, b)
    }

    pub fn rows(&self) -> usize {
        self.a.rows()
    }

    pub fn cols(&self) -> usize {
        self.a.cols()
    }

    pub fn payoff_a(&self) -> &Matrix {
        &self.a
    }

    pub fn payoff_b(&self) -> &Matrix {
        &self.b
    }

    fn check_dims(&self, x: &MixedStrategy, y: &MixedStrategy) -> Result<()> {
        if x.len() != self.rows() || y.len() != self.cols() {
            return Err(Error::Dimension(format!(
                "strategies of length ({}, {}) for a {}x{} game",
                x.len(),
                y.len(),
                self.rows(),
                self.cols()
            )));
        }
        Ok(())
    }

    /// `(xᵀAy, xᵀBy)`.
    pub fn payoff(&self, x: &MixedStrategy, y: &MixedStrategy) -> Result<(f64, f64)> {
        self.check_dims(x, y)?;
        Ok((self.a.bilinear(x.weights(), y.weights()), self.b.bilinear(x.weights(), y.weights())))
    }

    /// Best pure-deviation gains `(max_i eᵢᵀAy − xᵀAy, max_j xᵀBeⱼ − xᵀBy)`.
    pub fn regrets(&self, x: &MixedStrategy, y: &MixedStrategy) -> Result<(f64, f64)> {
        self.check_dims(x, y)?;
        Ok(self.regrets_raw(x.weights(), y.weights()))
    }

    pub(crate) fn regrets_raw(&self, x: &[f64], y: &[f64]) -> (f64, f64) {
        let ay = self.a.mul_vec(y);
        let xb = self.b.vec_mul(x);
        let row_value = dot(x, &ay);
        let col_value = dot(&xb, y);
        let best_row = ay.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let best_col = xb.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (best_row - row_value, best_col - col_value)
    }

    /// Restriction to `rows × cols`; both index sets are sorted and deduplicated.
    pub fn restrict(&self, rows: &[usize], cols: &[usize]) -> Result<RestrictedGame> {
        let rows = normalize_index_set(rows, self.rows(), "row")?;
        let cols = normalize_index_set(cols, self.cols(), "column")?;
        let game = Self { a: self.a.select(&rows, &cols), b: self.b.select(&rows, &cols) };
        Ok(RestrictedGame { game, row_map: rows, col_map: cols })
    }

    /// Writes the game in the text format: `n m`, then the rows of A, then the rows of B.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.rows(), self.cols());
        write_matrix_rows(&mut out, &self.a);
        write_matrix_rows(&mut out, &self.b);
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut tokens = text.split_whitespace();
        let mut next_usize = |what: &str| -> Result<usize> {
            tokens
                .next()
                .ok_or_else(|| Error::Parse(format!("missing {what}")))?
                .parse::<usize>()
                .map_err(|e| Error::Parse(format!("bad {what}: {e}")))
        };
        let n = next_usize("row count")?;
        let m = next_usize("column count")?;
        let values: Vec<f64> = text
            .split_whitespace()
            .skip(2)
            .map(|t| t.parse::<f64>().map_err(|e| Error::Parse(format!("bad payoff {t:?}: {e}"))))
            .collect::<Result<_>>()?;
        if values.len() != 2 * n * m {
            return Err(Error::Parse(format!(
                "expected {} payoffs for a {n}x{m} game, found {}",
                2 * n * m,
                values.len()
            )));
        }
        let a = Matrix::from_vec(n, m, values[..n * m].to_vec())?;
        let b = Matrix::from_vec(n, m, values[n * m..].to_vec())?;
        Self::new(a, b)
    }
}

pub(crate) fn write_matrix_rows(out: &mut String, m: &Matrix) {
    for i in 0..m.rows() {
        let row = m.row(i);
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                out.push(' ');
            }
            // `{}` on f64 is the shortest representation that round-trips.
            let _ = write!(out, "{v}");
        }
        out.push('\n');
    }
}

fn normalize_index_set(idx: &[usize], bound: usize, what: &str) -> Result<Vec<usize>> {
    if idx.is_empty() {
        return Err(Error::InvalidArgument(format!("empty {what} index set")));
    }
    let mut v = idx.to_vec();
    v.sort_unstable();
    v.dedup();
    if let Some(&bad) = v.iter().find(|&&i| i >= bound) {
        return Err(Error::Dimension(format!("{what} index {bad} out of range 0..{bound}")));
    }
    Ok(v)
}

/// A restricted game together with the index maps back into its parent.
#[derive(Debug, Clone, PartialEq)]
pub struct RestrictedGame {
    pub game: BimatrixGame,
    pub row_map: Vec<usize>,
    pub col_map: Vec<usize>,
}

impl RestrictedGame {
    /// Restricts again; the returned maps point into the original parent.
    pub fn restrict(&self, rows: &[usize], cols: &[usize]) -> Result<RestrictedGame> {
        let inner = self.game.restrict(rows, cols)?;
        Ok(RestrictedGame {
            row_map: inner.row_map.iter().map(|&i| self.row_map[i]).collect(),
            col_map: inner.col_map.iter().map(|&j| self.col_map[j]).collect(),
            game: inner.game,
        })
    }
}

/// A probability vector with its support at tolerance τ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedStrategy {
    weights: Vec<f64>,
    support: Vec<usize>,
    tol: f64,
}

impl MixedStrategy {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(weights, DEFAULT_SUPPORT_TOL)
    }

    /// Entries in `[-tol, 0)` are clamped to zero; sums off by less than
    /// [`RENORMALIZE_TOL`] are renormalized; anything else is rejected.
    pub fn with_tolerance(mut weights: Vec<f64>, tol: f64) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidStrategy("empty weight vector".into()));
        }
        for (i, w) in weights.iter_mut().enumerate() {
            if !w.is_finite() {
                return Err(Error::InvalidStrategy(format!("weight {i} is not finite")));
            }
            if *w < 0.0 {
                if *w < -tol {
                    return Err(Error::InvalidStrategy(format!("weight {i} = {w} is negative")));
                }
                *w = 0.0;
            }
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > RENORMALIZE_TOL {
            return Err(Error::InvalidStrategy(format!("weights sum to {sum}, not 1")));
        }
        if sum != 1.0 {
            for w in weights.iter_mut() {
                *w /= sum;
            }
        }
        let support = weights.iter().enumerate().filter(|(_, &w)| w > tol).map(|(i, _)| i).collect();
        Ok(Self { weights, support, tol })
    }

    pub fn pure(n: usize, i: usize) -> Result<Self> {
        if i >= n {
            return Err(Error::Dimension(format!("pure strategy {i} out of range 0..{n}")));
        }
        let mut w = vec![0.0; n];
        w[i] = 1.0;
        Self::new(w)
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(vec![1.0 / n as f64; n])
    }

    /// Uniform on the given index set.
    pub fn uniform_on(n: usize, set: &[usize]) -> Result<Self> {
        let mut w = vec![0.0; n];
        for &i in set {
            if i >= n {
                return Err(Error::Dimension(format!("index {i} out of range 0..{n}")));
            }
            w[i] = 1.0;
        }
        let k = w.iter().filter(|&&v| v > 0.0).count();
        if k == 0 {
            return Err(Error::InvalidStrategy("empty support".into()));
        }
        w.iter_mut().for_each(|v| *v /= k as f64);
        Self::new(w)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn l2_norm(&self) -> f64 {
        norm_l2(&self.weights)
    }

    /// Parses one line of whitespace-separated weights.
    pub fn from_text(text: &str) -> Result<Self> {
        let w = text
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|e| Error::Parse(format!("bad weight {t:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(w)
    }

    pub fn to_text(&self) -> String {
        let parts: Vec<String> = self.weights.iter().map(|w| format!("{w}")).collect();
        parts.join(" ") + "\n"
    }
}

pub fn payoff(game: &BimatrixGame, x: &MixedStrategy, y: &MixedStrategy) -> Result<(f64, f64)> {
    game.payoff(x, y)
}

pub fn regrets(game: &BimatrixGame, x: &MixedStrategy, y: &MixedStrategy) -> Result<(f64, f64)> {
    game.regrets(x, y)
}

/// True iff both regrets are at most `eps` plus [`EPS_SLACK`].
pub fn is_epsilon_equilibrium(
    game: &BimatrixGame,
    x: &MixedStrategy,
    y: &MixedStrategy,
    eps: f64,
) -> Result<bool> {
    if !(eps >= 0.0) {
        return Err(Error::InvalidArgument(format!("eps must be nonnegative, got {eps}")));
    }
    let (r, c) = game.regrets(x, y)?;
    Ok(r <= eps + EPS_SLACK && c <= eps + EPS_SLACK)
}

pub fn restrict(game: &BimatrixGame, rows: &[usize], cols: &[usize]) -> Result<RestrictedGame> {
    game.restrict(rows, cols)
}

/// A strategy pair with its regrets and summary geometry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumRecord {
    pub x: MixedStrategy,
    pub y: MixedStrategy,
    pub regret_row: f64,
    pub regret_col: f64,
    pub support_sizes: (usize, usize),
    pub l2_norms: (f64, f64),
}

impl EquilibriumRecord {
    pub fn new(game: &BimatrixGame, x: MixedStrategy, y: MixedStrategy) -> Result<Self> {
        let (regret_row, regret_col) = game.regrets(&x, &y)?;
        Ok(Self {
            support_sizes: (x.support().len(), y.support().len()),
            l2_norms: (x.l2_norm(), y.l2_norm()),
            regret_row,
            regret_col,
            x,
            y,
        })
    }

    pub fn max_regret(&self) -> f64 {
        self.regret_row.max(self.regret_col)
    }

    /// ℓ∞ distance between two profiles, over both players.
    pub fn distance(&self, other: &Self) -> f64 {
        crate::matrix::dist_linf(self.x.weights(), other.x.weights())
            .max(crate::matrix::dist_linf(self.y.weights(), other.y.weights()))
    }
}
