//! Configuration, file formats and command implementations for the `nod`
//! binary.

pub mod commands;
pub mod config;
pub mod error;
pub mod formats;
pub mod parallel;

pub use commands::{run, Command};
pub use config::{Overrides, RunConfig};
pub use error::{CliError, CliResult};
