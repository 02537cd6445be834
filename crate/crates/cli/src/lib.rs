//! Command-line pipeline: one subcommand per stage, one run directory, one
//! TOML run config.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use chrono::NaiveDate;
use clap::{Parser, Subcommand};

pub use commands::Ctx;
pub use config::RunConfig;
pub use error::{CliError, Kind};

#[derive(Debug, Parser)]
#[command(name = "coolplan", version, about = "Cooling-load forecasting and chiller plant planning")]
pub struct Cli {
    /// Run config (TOML); built-in defaults when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Run directory; overrides `paths.out`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate synthetic telemetry.csv and weather.csv.
    Synth {
        #[arg(long)]
        days: Option<u32>,
    },
    /// Resample telemetry to half-hour load and apply the Kalman filter.
    Filter {
        #[arg(long)]
        telemetry: Option<PathBuf>,
    },
    /// Fit the weather clusters the configured feature sets need.
    Cluster {
        #[arg(long)]
        weather: Option<PathBuf>,
    },
    /// Write the supervised feature matrices.
    Features {
        /// Feature set name; repeatable. All configured sets by default.
        #[arg(long = "set")]
        sets: Vec<String>,
    },
    /// Train every configured family on every configured feature set.
    Train {
        #[arg(long = "set")]
        sets: Vec<String>,
        /// `mlp`, `lstm` or `linear`; repeatable.
        #[arg(long = "family")]
        families: Vec<String>,
    },
    /// Predict half-hour-ahead load with a trained model file.
    Predict {
        #[arg(long)]
        model: PathBuf,
    },
    /// Optimise chiller loading for every slot of a load series.
    Dispatch {
        /// Load series CSV; `load_filtered.csv` in the run directory by default.
        #[arg(long)]
        loads: Option<PathBuf>,
        /// Add the grid-oracle power and gap columns.
        #[arg(long)]
        oracle: bool,
        /// Restrict to one day (YYYY-MM-DD).
        #[arg(long)]
        day: Option<NaiveDate>,
    },
    /// Simulate the storage proposals on one day and compare their costs.
    Tes {
        #[arg(long)]
        loads: Option<PathBuf>,
        /// Day to simulate; the last complete day by default.
        #[arg(long)]
        day: Option<NaiveDate>,
    },
    /// Run the full pipeline and write summary.json.
    Report,
}

/// Resolves the configuration with command-line overrides applied.
pub fn resolve_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.paths.out = o.clone();
    }
    match &cli.command {
        Command::Synth { days: Some(d) } => cfg.synth.days = *d,
        Command::Features { sets } | Command::Train { sets, .. } if !sets.is_empty() => {
            cfg.features.sets = sets.clone();
        }
        _ => {}
    }
    if let Command::Train { families, .. } = &cli.command {
        if !families.is_empty() {
            cfg.report.families = families.clone();
        }
    }
    cfg.sync_seeds();
    cfg.validate()?;
    Ok(cfg)
}

pub fn execute(cli: &Cli) -> Result<(), CliError> {
    let ctx = Ctx::new(resolve_config(cli)?);
    match &cli.command {
        Command::Synth { .. } => commands::cmd_synth(&ctx),
        Command::Filter { telemetry } => commands::cmd_filter(&ctx, telemetry.as_deref()),
        Command::Cluster { weather } => commands::cmd_cluster(&ctx, weather.as_deref()),
        Command::Features { .. } => commands::cmd_features(&ctx),
        Command::Train { .. } => commands::cmd_train(&ctx).map(drop),
        Command::Predict { model } => commands::cmd_predict(&ctx, model).map(drop),
        Command::Dispatch { loads, oracle, day } => {
            commands::cmd_dispatch(&ctx, loads.as_deref(), *oracle, *day).map(drop)
        }
        Command::Tes { loads, day } => commands::cmd_tes(&ctx, loads.as_deref(), *day).map(drop),
        Command::Report => commands::cmd_report(&ctx).map(drop),
    }
}

/// Parses `args`, runs the command and returns the process exit status.
/// Failures print one `error[E_CODE]: message` line to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind as K;
            if matches!(e.kind(), K::DisplayHelp | K::DisplayVersion | K::DisplayHelpOnMissingArgumentOrSubcommand) {
                let _ = e.print();
                return if e.kind() == K::DisplayHelpOnMissingArgumentOrSubcommand { 2 } else { 0 };
            }
            let first = e.to_string();
            let first = first.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
            eprintln!("{}", CliError::config(first).line());
            return Kind::Config.exit_code();
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", e.line());
            e.kind.exit_code()
        }
    }
}
