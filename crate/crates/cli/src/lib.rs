//! Config-driven scenario runner for the `entbase` binary.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod validate;

pub use commands::{cmd_run, cmd_sweep, sweep_rows, Summary};
pub use config::ScenarioConfig;
pub use error::CliError;
