//! Configuration, presets, data ingestion and the experiment drivers.

pub mod config;
pub mod ingest;
pub mod presets;
pub mod runner;

pub use config::{
    BoundSuite, ComplexitySettings, EnvironmentConfig, EnvironmentSource, ExperimentConfig,
    RunSettings,
};
pub use ingest::{ingest_arm_data, ArmSummary, IngestReport};
pub use presets::Preset;
pub use runner::{
    complexity_of, evaluate_grid, report_complexity, run_bound_validation, run_experiment,
    validate_bounds, with_jobs, BoundValidationOutput, ComplexityOutput, ExperimentOutput,
    ResultRow,
};
