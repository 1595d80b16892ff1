//! Command-line front end for the `dynkin-core` solvers and oracles.
//!
//! A game file is a flat TOML document whose `kind` selects the game type.
//! [`run`] parses one file, dispatches a command and renders the report.

pub mod commands;
pub mod error;
pub mod format;
pub mod input;
pub mod number;

pub use commands::{run, Command, Options, Outcome};
pub use error::CliError;
