//! Command-line front end for the `xyjoint` joint-measurement toolkit.
//!
//! Each subcommand writes a schema-tagged TOML artifact plus a `.manifest`
//! file recording the command, tool version and wall-clock time. Artifacts
//! themselves carry no timestamps, so reruns with the same flags reproduce
//! them byte for byte.

pub mod args;
pub mod bundle;
pub mod checks;
pub mod commands;
pub mod error;
pub mod format;

pub use args::{Cli, Command};
pub use error::{CliError, CliResult};

pub fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::BuildPovm(a) => commands::cmd_build_povm(a),
        Command::Simulate(a) => commands::cmd_simulate(a),
        Command::Estimate(a) => commands::cmd_estimate(a),
        Command::Reconstruct(a) => commands::cmd_reconstruct(a),
        Command::Verify(a) => commands::cmd_verify(a),
    }
}
