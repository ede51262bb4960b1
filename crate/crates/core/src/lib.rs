//! Quantile-based fixed-budget best-arm identification.
//!
//! The crate ranks arms by a `tau`-quantile of their reward distribution
//! instead of the mean, and provides:
//!
//! * [`distributions`]: folded-normal, exponential and empirical reward models;
//! * [`order_stats`]: order statistics, empirical quantiles and spacings;
//! * [`concentration`]: tail bounds for order statistics and quantiles of IHR
//!   distributions, problem complexity, and Monte-Carlo checks of the bounds;
//! * [`policies`]: Q-SAR and the Q-SR, SAR, SR, Q-Uniform and Q-BE baselines;
//! * [`bandit`]: environments, gaps and probability-of-error estimation;
//! * [`experiments`]: presets, config files, data ingestion and CSV output.

pub mod bandit;
pub mod concentration;
pub mod distributions;
pub mod error;
pub mod experiments;
pub mod order_stats;
pub mod policies;
pub mod rng;

pub use bandit::{
    evaluate, Environment, ErrorEstimate, EvalOptions, GapProfile, Policy, RunOutcome,
};
pub use distributions::{DistributionSpec, QuantileLevel};
pub use error::{Error, Result};
pub use policies::{PolicyConfig, PolicyKind, Statistic};
