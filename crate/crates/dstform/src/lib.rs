//! Scenario files, presets, output formats and command implementations for
//! the `dstform` command-line tool.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod presets;

pub use config::{Overrides, ScenarioConfig};
pub use error::CliError;
