//! Command-line front end for `cyclelab`: configuration and orchestration.

pub mod config;
pub mod run;

pub use config::{parse_config, Command, ExperimentConfig, PartialConfig};
pub use run::{run, Outcome};
