//! Experiment drivers for pinching-antenna sensing: configuration loading,
//! scene sampling, method comparison and result tables.

pub mod config;
pub mod error;
pub mod experiments;
pub mod method;
pub mod results;
pub mod scenes;

pub use config::{ExperimentConfig, Resolved};
pub use error::LabError;
pub use experiments::{run_cdf_experiment, run_robustness_experiment, RunOptions};
pub use method::{run_method, Method, MethodOutcome};
pub use results::{write_csv, write_manifest, Manifest, ResultRow};
pub use scenes::sample_scenes;
