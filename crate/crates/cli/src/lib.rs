//! Command-line front end: configuration parsing, subcommand dispatch and
//! CSV output.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod config;
pub mod error;
pub mod run;

pub use config::RunConfig;
pub use error::{CliError, CliResult};
pub use run::{run, RunOutput, Subcommand};
