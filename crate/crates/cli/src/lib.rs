//! Command-line verification suites over the `biharm-core` engine.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod report;

pub use cli::run;
pub use config::RunConfig;
pub use error::CliError;
pub use report::{Record, ResidualReport, Verdict};
