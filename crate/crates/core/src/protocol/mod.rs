//! Local-detection measurement protocol.
//!
//! Click probabilities (closed form and a 16-mode projector oracle),
//! postselection, seeded binomial sampling, visibility recovery from two
//! phase settings and first-order error propagation.

mod estimate;
mod probabilities;
mod sampling;
mod scaling;

pub use estimate::{
    error_partials, delta_p_error, estimate_from_delta_p, propagate_errors, replicate_rmse,
    run_observation, sample_fringes, solve_visibility, ErrorPartials, PhaseSettings,
    VisibilityEstimate, MIN_SETTING_SEPARATION,
};
pub use probabilities::{
    analytic_delta_p, postselect, raw_probabilities, raw_probabilities_oracle, RawProbabilities,
};
pub use sampling::{delta_p, derive_seed, sample_counts, DetectionCounts};
pub use scaling::{generic_scaling, scaling_laws, ChannelParams, ScalingLaw, DIVERGENCE_TOL};
