//! Sender/receiver game over a boolean channel where receivers trade off
//! accuracy against group status.
//!
//! * [`model`]: types, channel kernel, utilities.
//! * [`receiver`]: belief residuals and the receiver best response.
//! * [`equilibrium`]: closed-form sender optimum and the vertex-enumeration
//!   LP oracle it is checked against.
//! * [`estimator`]: bisection recovery of the band edges `k_A`, `k_B` from
//!   believe/don't-believe answers.
//! * [`experiments`]: parameter sweeps, monotonicity audits, Monte Carlo.

pub mod equilibrium;
pub mod error;
pub mod estimator;
pub mod experiments;
pub mod format;
pub mod model;
pub mod presets;
pub mod receiver;

pub use equilibrium::{
    augmented_params, closed_form_equilibrium, full_lp_oracle, lower_bound_check, reduced_lp_feasible, AugmentedParams,
    CaseLabel, EquilibriumResult, HasQuality, LpSolution,
};
pub use error::{Error, Result};
pub use estimator::{
    estimate_k, ground_truth_oracle, strategy_from_estimates, synthesize_from_oracle, BelieveOracle, EstimationResult,
};
pub use experiments::{
    audit_monotonicity, audit_sweep, monte_carlo_accuracy, run_sweep, Direction, MonteCarloEstimate, Param, SweepAxis,
    SweepResult, SweepSpec,
};
pub use model::{
    quality, IdentityProfile, Message, Population, ReceiverStrategy, SenderStrategy, SourcePrior, SourceType,
};
pub use receiver::{belief_residuals, believes, best_response, BeliefResiduals};
