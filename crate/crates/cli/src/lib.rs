//! Command-line driver: emits phase-shift tables, cross-section sweeps and
//! validation reports as CSV or JSON, each with a manifest recording the
//! resolved configuration and a checksum of the data.

pub mod args;
pub mod commands;
pub mod error;
pub mod output;
pub mod settings;

pub use args::Cli;
pub use commands::{run, Status};
pub use error::{exit, CliError};
