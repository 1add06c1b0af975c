//! Brownian-bridge interpolation of gaps in 2-D trajectories.
//!
//! The crate estimates a trajectory's diffusion coefficient from its observed
//! points, fills a run of missing points with a Brownian bridge (or a straight
//! line), and evaluates the expected path length and radius of gyration of
//! the result. Synthetic movement models and an experiment runner are
//! included for benchmarking.

pub mod bridge;
pub mod csvio;
pub mod error;
pub mod estimator;
pub mod experiment;
pub mod gapfill;
pub mod generators;
pub mod metrics;
pub mod seed;
pub mod special;
pub mod stats;
pub mod trajectory;

pub use bridge::{bridge_marginal, expected_path_length, sample_bridge, BridgeParams};
pub use error::{Error, Result};
pub use estimator::{
    closed_form_sigma, estimate_sigma, estimate_sigma_pooled, extract_triples, log_likelihood,
    SearchConfig, SigmaEstimate,
};
pub use experiment::{run_experiment, ExperimentConfig, ExperimentKind, ExperimentReport};
pub use gapfill::{
    estimate_gap_length, estimate_gap_rog, estimate_gap_sigma, fill_bridge, fill_gap, fill_linear,
    FillMethod, FillOutcome, RogEstimate,
};
pub use generators::{default_internal_state_table, generate, InternalStateTable, ModelSpec};
pub use metrics::{gap_metrics, path_length, radius_of_gyration, GapMetrics, LengthBasis};
pub use special::{bessel_i, laguerre_half, rice_mean, RiceParams};
pub use trajectory::{
    build_trajectory, excise_gap, splice_fill, FilledTrajectory, GappedTrajectory, Point2, Source,
    TimedPoint, Trajectory,
};
