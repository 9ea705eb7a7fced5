//! Smoothed-hard bimatrix games.
//!
//! Builds games of the form `P⊗J + Z₀ + Z₁ + A_ε`, `Q⊗J − Z₀ − Z₁ + B_ε`
//! (a source game tensored with an all-ones block, a Rademacher and a
//! uniform zero-sum gadget, and i.i.d. smoothing noise), solves them, decodes
//! their equilibria back to the source game, and measures the structural
//! quantities that make the construction work: support sizes, ℓ2 norms,
//! the robust-partition benchmark β, anti-concentration and bilinear
//! concentration, plus exact checks of the supporting binomial inequalities.

pub mod error;
pub mod game;
pub mod harness;
pub mod linalg;
pub mod matrix;
pub mod reduction;
pub mod seed;
pub mod solvers;
pub mod structure;

pub use error::{Error, Result};
pub use game::{BimatrixGame, EquilibriumRecord, MixedStrategy};
pub use matrix::Matrix;
