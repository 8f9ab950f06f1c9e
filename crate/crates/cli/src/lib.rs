//! Batch front end of the `besov-ipm` experiments: configuration parsing,
//! dispatch and artifact emission.

pub mod config;
pub mod error;
pub mod output;
pub mod run;

pub use config::{parse_config, Cli, Command, ConfigLayer, RunConfig};
pub use error::CliError;
pub use run::{run, Outcome};
