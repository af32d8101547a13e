//! Command implementations behind the `ghostosc` binary. Everything here is
//! a pure function from a parsed configuration to a tabular `Output`, so the
//! whole surface is testable without spawning processes.

pub mod config;
pub mod emit;
pub mod run;

pub use config::{Cli, Command, GRange};
pub use run::{run, CliError, Output};
