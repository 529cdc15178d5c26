//! Command-line front end: named experiments driven by a TOML config,
//! each writing one CSV table.

mod commands;
mod config;
mod table;

use std::path::PathBuf;

use chrono::{DateTime, SecondsFormat};
use clap::{Parser, Subcommand};

pub use commands::{
    cmd_bell_surface, cmd_evolve, cmd_localization, cmd_purify, cmd_validate_regimes,
    protocol_params,
};
pub use config::{
    apply_override, BellSurfaceConfig, EvolveConfig, EvolveMode, LocalizationConfig, ModelConfig,
    PurifyConfig, RegimesConfig, RunConfig, Units,
};
pub use table::{Cell, Column, ResultTable};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical(_) => EXIT_NUMERICAL,
            CliError::Config(_) | CliError::Io(_) => EXIT_CONFIG,
        }
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        use crate::Error::*;
        match e {
            InvalidArgument(_) | StepSize { .. } | Truncation { .. } => {
                CliError::Config(e.to_string())
            }
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "cavity-purify",
    version,
    about = "Dark-state entanglement and no-photon purification in a cavity"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (overrides `out`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// RNG seed (overrides `seed`).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Dotted `key=value` override, applied after the file; repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Time series under the interaction Hamiltonian.
    Evolve,
    /// Repeated no-photon purification rounds.
    Purify,
    /// Bell-violation surface over (|alpha|, N) and its threshold contour.
    BellSurface,
    /// Regime inequalities and full-versus-effective dynamics.
    ValidateRegimes,
    /// Fidelity against coupling asymmetry.
    Localization,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Evolve => "evolve",
            Command::Purify => "purify",
            Command::BellSurface => "bell-surface",
            Command::ValidateRegimes => "validate-regimes",
            Command::Localization => "localization",
        }
    }
}

/// `SOURCE_DATE_EPOCH` when set, else the Unix epoch, so output stays reproducible.
fn timestamp() -> Result<String, CliError> {
    let secs = match std::env::var("SOURCE_DATE_EPOCH") {
        Ok(v) => v
            .trim()
            .parse::<i64>()
            .map_err(|_| CliError::Config(format!("bad SOURCE_DATE_EPOCH `{v}`")))?,
        Err(_) => 0,
    };
    let t = DateTime::from_timestamp(secs, 0)
        .ok_or_else(|| CliError::Config("SOURCE_DATE_EPOCH out of range".into()))?;
    Ok(t.to_rfc3339_opts(SecondsFormat::Secs, true))
}

/// Resolves the configuration for `cli`: file, then `--set`, then `--seed`/`--out`.
pub fn resolve_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let text = match &cli.config {
        Some(p) => Some(
            std::fs::read_to_string(p)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?,
        ),
        None => None,
    };
    let mut cfg = RunConfig::load(text.as_deref(), &cli.set)?;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    // TOML integers are signed 64-bit
    if i64::try_from(cfg.seed).is_err() {
        return Err(CliError::Config(format!(
            "seed {} exceeds {}",
            cfg.seed,
            i64::MAX
        )));
    }
    if let Some(o) = &cli.out {
        cfg.out = o.clone();
    }
    let name = cli.command.name();
    match &cfg.experiment {
        Some(e) if e != name => {
            return Err(CliError::Config(format!(
                "config is for experiment `{e}`, not `{name}`"
            )));
        }
        _ => cfg.experiment = Some(name.to_string()),
    }
    Ok(cfg)
}

/// Runs one experiment and returns its table with the standard header.
pub fn execute(command: Command, cfg: &RunConfig) -> Result<ResultTable, CliError> {
    let body = match command {
        Command::Evolve => cmd_evolve(cfg)?,
        Command::Purify => cmd_purify(cfg)?,
        Command::BellSurface => cmd_bell_surface(cfg)?,
        Command::ValidateRegimes => cmd_validate_regimes(cfg)?,
        Command::Localization => cmd_localization(cfg)?,
    };
    let mut table = ResultTable::new(&[]);
    table.columns = body.columns;
    table.rows = body.rows;
    table
        .meta(
            "tool",
            concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION")),
        )
        .meta("experiment", command.name())
        .meta("config_hash", format!("sha256:{}", cfg.hash()))
        .meta("seed", cfg.seed)
        .meta("timestamp", timestamp()?)
        .meta(
            "units",
            "rates in units of kappa, times in units of 1/kappa",
        );
    table.metadata.extend(body.metadata);
    table.meta("config", cfg.canonical());
    Ok(table)
}

/// Entry point behind `main`; returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let outcome = resolve_config(&cli).and_then(|cfg| {
        let table = execute(cli.command, &cfg)?;
        std::fs::create_dir_all(&cfg.out)?;
        let path = cfg.out.join(format!("{}.csv", cli.command.name()));
        std::fs::write(&path, table.to_csv())?;
        Ok(path)
    });
    match outcome {
        Ok(path) => {
            println!("{}", path.display());
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
