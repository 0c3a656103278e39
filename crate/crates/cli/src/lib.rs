//! Command-line pipelines and the HTTP session service.

pub mod commands;
pub mod error;
pub mod server;

pub use commands::{execute, Artifact, Cli, Command};
pub use error::{CliError, CliResult};
