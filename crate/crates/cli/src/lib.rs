//! Command implementations behind the `chaplygin` binary.

pub mod commands;
pub mod config;
pub mod error;
pub mod table;

pub use commands::{Report, VerifyOverrides};
pub use config::{LoadedConfig, ProblemConfig};
pub use error::CliError;
pub use table::Table;
