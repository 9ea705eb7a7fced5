//! Executable versions of the probabilistic facts behind the construction.

pub mod anticoncentration;
pub mod bilinear;
pub mod bounds;
pub mod geometry;
pub mod halfspace;
pub mod partition;
pub mod stats;

pub use anticoncentration::{
    anti_concentration_estimate, exact_sign_tail, monte_carlo_sign_tail, AntiConcentrationEstimate, EstimateMode,
};
pub use bilinear::{bilinear_concentration_probe, BilinearProbeReport, FamilyMax, SampleFamily};
pub use bounds::{
    binom_tail_lower_bound_check, binom_tail_sweep, binomial_row, entropy_binom_check, entropy_binom_sweep,
    erdos_dominance_check, BinomTailCase, BinomTailReport, EntropyCase, ErdosReport,
};
pub use geometry::{
    equilibrium_geometry_experiment, exact_rademacher_2x2_pure_probability, generate_game, goodness,
    run_geometry_trial, summarize, GameGenerator, GeometryConfig, GeometryStats, Goodness, ReducedGenerator,
    SolverChoice, TrialGame, TrialGeometry, TrialStatus,
};
pub use halfspace::{halfspace_interval_density, DensityComparison, GapSplit, HalfspaceReport, ProbeOutcome};
pub use partition::{benchmark_beta, robust_partition, Level, PartitionParams, PartitionReport};
pub use stats::{median, quantile, wilson_interval, Proportion, Quantiles};
