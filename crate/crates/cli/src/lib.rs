//! Command-line front end. `run` parses arguments, dispatches to the
//! commands and maps failures onto exit codes:
//! 0 success, 1 property failure, 2 domain error, 64 usage error.

pub mod commands;
pub mod config;
pub mod report;

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PROPERTY: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Usage(String),
    Domain(String),
    Property(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Domain(_) => EXIT_DOMAIN,
            CliError::Property(_) => EXIT_PROPERTY,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Domain(m) => write!(f, "error: {m}"),
            CliError::Property(m) => write!(f, "property failure: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<idsig::Error> for CliError {
    fn from(e: idsig::Error) -> Self {
        CliError::Domain(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "idsig", version, about = "Identity-aware signaling: equilibria, estimation, sweeps")]
pub struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file (CSV for sweep/simulate, JSON report otherwise).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for random draws; overrides the config's simulate seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Number of populations checked by `verify`.
    #[arg(long, global = true, default_value_t = 1000)]
    pub trials: u64,
    /// Fail with exit 1 when the sweep's monotonicity audit finds violations.
    #[arg(long, global = true)]
    pub audit: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Closed-form sender equilibrium of the config population.
    Equilibrium,
    /// Compare the closed form against the full LP on random populations.
    Verify,
    /// Recover k_A, k_B by bisection against ground-truth receivers.
    Estimate,
    /// Grid sweep of equilibrium quality, written as CSV.
    Sweep,
    /// Monte Carlo accuracy of the equilibrium strategy.
    Simulate,
}

/// Runs the CLI and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let sink: &mut dyn Write = if code == EXIT_OK { stdout } else { stderr };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match commands::dispatch(&cli, stdout) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "{e}");
            e.exit_code()
        }
    }
}
