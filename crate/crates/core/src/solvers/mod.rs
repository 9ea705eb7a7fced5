//! Equilibrium solvers: minimax LP for zero-sum games, Lemke–Howson for
//! general bimatrix games, and exhaustive support enumeration as the
//! brute-force oracle.

mod lemke_howson;
mod pure;
mod simplex;
mod support_enum;

use serde::{Deserialize, Serialize};

pub use lemke_howson::{
    lemke_howson, lemke_howson_with, LemkeHowsonOptions, LemkeHowsonOutcome, DEFAULT_PIVOT_LIMIT,
    LH_TOLERANCE,
};
pub use pure::pure_equilibria;
pub use simplex::{solve_zero_sum, ZeroSumSolution, LP_TOLERANCE};
pub use support_enum::{
    only_support_sizes_equal_check, only_support_sizes_equal_report, subsets, support_enumeration,
    support_enumeration_with, SupportEnumOptions, SupportPair, UnequalSupportReport,
    MAX_UNEQUAL_CHECK_SIZE,
};

use crate::error::Result;
use crate::game::{BimatrixGame, EquilibriumRecord};

/// Every reported equilibrium has both regrets at most this.
pub const SOLVER_TOL: f64 = 1e-8;
/// Equilibria closer than this in ℓ∞ are treated as one.
pub const DEDUP_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverMethod {
    Lp,
    LemkeHowson,
    SupportEnumeration,
}

impl std::str::FromStr for SolverMethod {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lp" => Ok(Self::Lp),
            "lh" | "lemke-howson" => Ok(Self::LemkeHowson),
            "support-enum" | "support-enumeration" => Ok(Self::SupportEnumeration),
            other => Err(crate::error::Error::InvalidArgument(format!("unknown solver {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverReport {
    pub equilibria: Vec<EquilibriumRecord>,
    /// Support pair per equilibrium, for enumeration results.
    pub supports: Vec<SupportPair>,
    pub method: SolverMethod,
    /// Pivots (LP, Lemke–Howson) or support pairs examined (enumeration).
    pub work: usize,
    pub degenerate: bool,
    pub skipped_singular: usize,
}

/// Runs Lemke–Howson from one label and wraps the outcome as a report.
pub fn lemke_howson_report(
    game: &BimatrixGame,
    label: usize,
    opts: &LemkeHowsonOptions,
) -> Result<SolverReport> {
    let out = lemke_howson_with(game, label, opts)?;
    Ok(SolverReport {
        equilibria: vec![out.record],
        supports: Vec::new(),
        method: SolverMethod::LemkeHowson,
        work: out.pivots,
        degenerate: out.degenerate,
        skipped_singular: 0,
    })
}

/// Solves `(A, B)` as the zero-sum game with row payoff `A`; `B` is ignored.
pub fn zero_sum_report(game: &BimatrixGame) -> Result<SolverReport> {
    let sol = solve_zero_sum(game.payoff_a())?;
    let record = EquilibriumRecord::new(game, sol.x, sol.y)?;
    Ok(SolverReport {
        equilibria: vec![record],
        supports: Vec::new(),
        method: SolverMethod::Lp,
        work: sol.pivots,
        degenerate: false,
        skipped_singular: 0,
    })
}
