//! Command-line driver, file formats and parallel execution for `tps-core`.
//!
//! The binary is a thin wrapper around [`run::execute`], which takes a
//! [`config::CliConfig`] resolved from flags, an optional TOML file and
//! built-in defaults.

pub mod cli;
pub mod config;
pub mod error;
pub mod exec;
pub mod output;
pub mod run;
pub mod verify;

pub use config::CliConfig;
pub use error::CliError;
pub use exec::Pool;
