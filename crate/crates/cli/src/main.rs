//! `topdc`: batch front end for rate, phase-matching, mode and taper runs.

mod commands;
mod config;
mod error;
mod output;
mod setup;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use topdc_core::provenance::sha256_hex;

use crate::commands::Context;
use crate::config::{Format, LoadedConfig};
use crate::error::CliResult;
use crate::output::{Header, Writer};
use crate::setup::DataHashes;

#[derive(Debug, Parser)]
#[command(
    name = "topdc",
    version,
    about = "Photon-triplet generation in optical fibers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, clap::Args)]
struct Common {
    /// Run configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output.directory`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format; overrides `output.format`.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Grid points per axis; overrides `process.grid_resolution`.
    #[arg(long)]
    grid: Option<usize>,
    /// Suppress progress messages.
    #[arg(long)]
    quiet: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Effective index, group velocity and loss of guided modes.
    Modes(Common),
    /// Scan a parameter for phase-matching roots.
    PhaseMatch(Common),
    /// Spontaneous triplet rate or seeded pairs per pulse.
    Rate(Common),
    /// Spectral density grids, one per sweep value.
    SpectralDensity(Common),
    /// Adiabaticity check of a taper profile.
    TaperCheck(Common),
}

/// Body of one subcommand.
type Handler = fn(&mut Context, &mut Writer) -> CliResult<()>;

fn run(command: &'static str, args: &Common, f: Handler) -> CliResult<()> {
    let cfg = LoadedConfig::read(&args.config)?;
    let config_hash = sha256_hex(cfg.text.as_bytes());
    let dir = args
        .out
        .clone()
        .or_else(|| cfg.config.output.directory.as_ref().map(|d| cfg.resolve(d)))
        .unwrap_or_else(|| PathBuf::from("topdc-out"));
    let format = args.format.or(cfg.config.output.format).unwrap_or_default();
    if args.grid == Some(0) {
        return Err(error::CliError::Config(
            "--grid: resolution must be at least 2".into(),
        ));
    }
    let mut ctx = Context {
        grid: args.grid,
        cfg,
        hashes: DataHashes::default(),
    };
    let mut writer = Writer::new(
        dir,
        format,
        Header::new(command, config_hash, &DataHashes::default()),
    )?;
    f(&mut ctx, &mut writer)?;
    for path in writer.paths() {
        log::info!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, args, f): (&'static str, &Common, Handler) = match &cli.command {
        Command::Modes(a) => ("modes", a, commands::modes),
        Command::PhaseMatch(a) => ("phase-match", a, commands::phase_match),
        Command::Rate(a) => ("rate", a, commands::rate),
        Command::SpectralDensity(a) => ("spectral-density", a, commands::spectral_density),
        Command::TaperCheck(a) => ("taper-check", a, commands::taper_check),
    };
    let level = if args.quiet { "warn" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    match run(name, args, f) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
