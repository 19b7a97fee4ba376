//! Library side of the `nondarcy` command-line tool.

pub mod config;
pub mod error;
pub mod fit;
pub mod report;
pub mod sweep;
pub mod tables;
pub mod validate;

pub use config::RunConfig;
pub use error::{CliError, CliResult};
