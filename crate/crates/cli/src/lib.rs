//! Command-line front end for the two-slit simulator.
//!
//! Exit codes: 0 success, 2 usage/config/IO error, 3 physical validation
//! failure, 4 numerical failure. Artifacts are written only after every
//! computation in a command has succeeded.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

mod commands;
pub mod config;
pub mod output;

use config::RunConfig;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("{0}")]
    Config(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("io error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }
}

pub(crate) fn core_error(e: twoslit_core::Error) -> CliError {
    use twoslit_core::Error as E;
    match e {
        E::Validation(report) => CliError::Validation(report.summary()),
        E::InvalidArgument(m) | E::InvalidState(m) => CliError::Validation(m),
        other => CliError::Numerical(other.to_string()),
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "twoslit",
    version,
    about = "Two-slit interference with a which-path detector"
)]
pub struct Cli {
    /// Worker threads for the parallel kernels (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// JSON run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; overrides `output.directory`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Screen intensities for every channel of one configuration.
    Simulate(RunArgs),
    /// Visibility and onset metrics over `sweep.d_values`.
    Sweep(RunArgs),
    /// Sampled path bundles and their crossings.
    Paths {
        #[command(flatten)]
        run: RunArgs,
        /// Overrides `paths.seed`.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Packet uncertainties for a path length, printed as JSON.
    #[command(allow_negative_numbers = true)]
    Uncertainty {
        #[arg(long)]
        distance: f64,
        #[arg(long, default_value_t = 1.0)]
        mass: f64,
        #[arg(long)]
        kinetic_energy: f64,
    },
}

fn load(args: &RunArgs) -> Result<(RunConfig, PathBuf), CliError> {
    let cfg = RunConfig::load(&args.config)?;
    let out = args.out.clone().unwrap_or_else(|| cfg.output.directory.clone());
    Ok((cfg, out))
}

fn report(written: Vec<PathBuf>) {
    for p in written {
        println!("wrote {}", p.display());
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Simulate(args) => {
            let (cfg, out) = load(&args)?;
            report(commands::simulate(&cfg, &out)?);
        }
        Command::Sweep(args) => {
            let (cfg, out) = load(&args)?;
            report(commands::sweep(&cfg, &out)?);
        }
        Command::Paths { run, seed } => {
            let (cfg, out) = load(&run)?;
            report(commands::paths(&cfg, &out, seed)?);
        }
        Command::Uncertainty {
            distance,
            mass,
            kinetic_energy,
        } => {
            print!("{}", commands::uncertainty(distance, mass, kinetic_energy)?);
        }
    }
    Ok(())
}

#[cfg(feature = "parallel")]
fn with_threads(threads: Option<usize>, f: impl FnOnce() -> Result<(), CliError> + Send) -> Result<(), CliError> {
    match threads {
        None => f(),
        Some(0) => Err(CliError::Usage("--threads must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Usage(format!("cannot build thread pool: {e}")))?
            .install(f),
    }
}

#[cfg(not(feature = "parallel"))]
fn with_threads(threads: Option<usize>, f: impl FnOnce() -> Result<(), CliError>) -> Result<(), CliError> {
    match threads {
        Some(0) => Err(CliError::Usage("--threads must be at least 1".into())),
        _ => f(),
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match with_threads(cli.threads, move || dispatch(cli.command)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
