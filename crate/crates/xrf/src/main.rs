//! Command-line driver.
//!
//! Four subcommands share one scenario pipeline: `structure` reports the
//! one-electron Dirac data behind a preset, `spectrum` computes the x-ray
//! band fluorescence density, `linewidths` evaluates the closed-form secular
//! observables, and `scan` maps the spectrum over x-ray detuning. Inputs
//! come from an optional config file plus flags; outputs are deterministic
//! text files. Exit codes: 0 success, 2 bad input or environment, 3 numeric
//! failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use xrf::commands::{self, CliError};
use xrf::config::Config;
use xrf::scenario;

#[derive(Parser)]
#[command(
    name = "xrf",
    version,
    about = "Resonance fluorescence of a two-color-driven three-level ion"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// One-electron Dirac structure data behind a preset
    Structure(RunArgs),
    /// Fluorescence spectrum of the x-ray band plus a summary
    Spectrum(RunArgs),
    /// Closed-form central and sideband linewidths
    Linewidths(RunArgs),
    /// Spectrum map over x-ray detuning with sideband tracking
    Scan(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario config file
    config: Option<PathBuf>,
    /// Preset working point: tl_row1, tl_row2, bi_fig1b, bi_row2, u_row1, u_row2
    #[arg(long)]
    preset: Option<String>,
    /// Output directory (default: [output] dir from the config, else `.`)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Base frequency-grid points (default: [grid] points from the config, else 4001)
    #[arg(long)]
    grid_points: Option<usize>,
    /// Reserved for stochastic extensions; accepted but unused
    #[arg(long)]
    seed: Option<u64>,
}

/// Honor XRF_THREADS for the scan parallelism; unset means rayon's default.
fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("XRF_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.parse().map_err(|_| {
        CliError::Config(format!("XRF_THREADS must be a positive integer, got `{raw}`"))
    })?;
    if n == 0 {
        return Err(CliError::Config("XRF_THREADS must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("thread pool setup: {e}")))
}

fn run(
    args: &RunArgs,
    command: fn(&scenario::Scenario, &Path) -> Result<(), CliError>,
) -> Result<(), CliError> {
    let cfg = match &args.config {
        Some(path) => Some(Config::from_file(path)?),
        None => None,
    };
    let scn = scenario::resolve(cfg.as_ref(), args.preset.as_deref(), args.grid_points)?;
    let out = args
        .out
        .clone()
        .or_else(|| scn.out_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    command(&scn, &out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (args, command): (&RunArgs, fn(&scenario::Scenario, &Path) -> Result<(), CliError>) =
        match &cli.cmd {
            Cmd::Structure(a) => (a, commands::structure),
            Cmd::Spectrum(a) => (a, commands::spectrum),
            Cmd::Linewidths(a) => (a, commands::linewidths),
            Cmd::Scan(a) => (a, commands::scan),
        };
    match init_threads().and_then(|()| run(args, command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(msg)) => {
            eprintln!("xrf: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Numeric(msg)) => {
            eprintln!("xrf: {msg}");
            ExitCode::from(3)
        }
    }
}
