//! Configuration-driven experiments on top of `gaugetn-core`: ground-state
//! runs, static-charge potential scans, result files and table dumps.

pub mod config;
pub mod fit;
pub mod record;
pub mod runner;
pub mod tables;

pub use config::{Ansatz, ConfigError, ExperimentConfig, Format, ModelName};
pub use record::{emit_results, ResultRecord, SCHEMA_VERSION};
pub use runner::{exit_code, run_ground_state, run_potential_scan};
