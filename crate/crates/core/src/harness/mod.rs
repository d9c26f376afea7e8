//! Seeded suites behind the command-line tool: configuration, execution and
//! report formatting.

pub mod commands;
pub mod config;
pub mod output;

pub use commands::{exit_code, run, Command, CommandOutput, Outcome};
pub use config::{Overrides, RunConfig, SCHEMA_VERSION};
