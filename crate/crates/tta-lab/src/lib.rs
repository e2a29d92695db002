//! Analysis toolkit for test-time augmentation (TTA) ensembles.
//!
//! Given the per-augmentation predictions of a fixed model on a labeled
//! calibration set, this crate estimates the residual correlation structure
//! of the augmentation strategies and answers the questions that follow from
//! it: what are the optimal combination weights, which strategies are
//! redundant, how does the combined risk split into accuracy and diversity,
//! and do the underlying averaging identities hold empirically.
//!
//! The crate never runs a model or applies an image transform — it starts
//! from prediction matrices (scalar outputs, squared loss).
//!
//! # Capabilities
//!
//! - **Γ estimation** ([`estimate_gamma`]): the m×m matrix of mean residual
//!   products across strategies; the single statistic everything else
//!   consumes.
//! - **Risk evaluation** ([`weighted_risk`], [`direct_risk`]): the quadratic
//!   form `wᵀΓw` and its sample-level counterpart, two independent routes to
//!   the same number.
//! - **Weight optimization** ([`solve_closed_form`], [`solve_projected`]):
//!   the analytic minimizer of the quadratic form on the weight simplex,
//!   with ridge regularization and conditioning diagnostics for the
//!   near-singular Γ that highly correlated augmentations produce.
//! - **Pruning** ([`prune_check`], [`greedy_prune`]): the removal inequality
//!   deciding when a strategy is redundant under uniform weights.
//! - **Decomposition** ([`decompose`]): the exact error−ambiguity split of
//!   the combined risk.
//! - **Simulation** ([`simulator`]): seeded equicorrelated-Gaussian
//!   experiments verifying the averaging bound, the `1/m` independence
//!   ratio, the removal-probability sweep and risk-estimator consistency.
//!
//! # Examples directory
//!
//! Each capability has a runnable example:
//!
//! ```text
//! cargo run --example estimate_gamma     # Γ from a small calibration set
//! cargo run --example optimal_weights    # closed-form vs projected weights
//! cargo run --example prune_redundant    # removal inequality + greedy loop
//! cargo run --example decompose_risk     # error−ambiguity decomposition
//! cargo run --example simulate_sweep     # removal probability vs correlation
//! cargo run --example verify_theorems    # Monte Carlo theorem checks
//! cargo run --example file_workflow      # CSV/JSON ingestion and reports
//! ```
//!
//! A thin `tta-lab` binary exposes the same operations for batch use; see
//! the README for the subcommands and file schemas.

pub mod cli;
pub mod data;
pub mod error;
pub mod io;
pub mod optimizer;
pub mod pruning;
pub mod report;
pub mod risk;
pub mod simulator;

pub use data::{PredictionSet, Provenance, WeightVector};
pub use error::{Error, Result};
pub use optimizer::{
    condition_diagnostics, solve_closed_form, solve_projected, SolverOptions, SolverReport,
};
pub use pruning::{greedy_prune, prune_check, PruneDecision};
pub use risk::{
    decompose, direct_risk, estimate_gamma, weighted_risk, DecompositionReport, GammaMatrix,
};
pub use simulator::{
    fig1_experiment, generate_correlated_errors, verify_consistency, verify_theorem1,
    verify_theorem2, ConsistencyReport, SimulationConfig, TheoremOneReport, TheoremTwoReport,
    TrialOutcome,
};
