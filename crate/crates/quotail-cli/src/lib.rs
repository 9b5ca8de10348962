//! Command-line front end for the quotient-model toolkit.
//!
//! The binary wraps `quotail-core` with file formats and provenance:
//! JSON configs in, CSV or JSON results out, and a `.manifest.json`
//! beside every output file recording the config digest, seed, and tool
//! version. All randomness is seed-and-stream addressed, so any output
//! can be reproduced byte for byte from its manifest.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod manifest;

pub use error::CliError;

use cli::{Cli, Command};

/// Execute a parsed command line.
pub fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Simulate(args) => commands::simulate::run(args),
        Command::Density(args) => commands::density::run(args),
        Command::Tail(args) => commands::tail::run(args),
        Command::Corr(args) => commands::corr::run(args),
        Command::Path(args) => commands::path::run(args),
        Command::Calibrate(args) => commands::calibrate::run(args),
    }
}
