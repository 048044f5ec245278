//! Configuration, orchestration and file output for quantum walk experiments.
//!
//! Every subcommand writes CSV bodies that are byte-identical for identical
//! inputs, with a JSON sidecar echoing the fully resolved configuration.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use args::{Cli, Command};
pub use config::{ExperimentConfig, Resolved, WeightSelector};
pub use error::CliError;

use std::path::PathBuf;

/// Runs one subcommand and returns the files it wrote.
pub fn run(command: &Command) -> Result<Vec<PathBuf>, CliError> {
    match command {
        Command::Simulate(a) => commands::simulate(&a.to_config()?.resolve()?),
        Command::Density(a) => commands::density(&a.to_config()?.resolve()?),
        Command::Moments(a) => commands::moments(&a.to_config()?.resolve()?),
        Command::Convergence(a) => commands::convergence(&a.to_config()?.resolve()?),
        Command::Figure1(a) => commands::figure1(&a.to_options()).map(|(_, files)| files),
    }
}
