use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use locvol_core::cli_io::{self, CommandReport, RunConfig};
use locvol_core::Error;

/// Local volatility pricing, recovery and stability diagnostics.
#[derive(Debug, Parser)]
#[command(name = "locvol", version)]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    out: PathBuf,
    /// Overrides the configured noise seed.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Multiplies every grid resolution.
    #[arg(long, global = true, value_name = "F")]
    resolution_scale: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Backward Black-Scholes price at the spot.
    Price {
        /// Strike; defaults to `price.strike` from the config.
        #[arg(long)]
        strike: Option<f64>,
    },
    /// Forward Dupire surface and its quote slice.
    Dupire,
    /// Synthetic quotes from the configured curve.
    Synthesize {
        /// Multiplicative noise level; defaults to `inverse.noise_level`.
        #[arg(long)]
        noise: Option<f64>,
    },
    /// Fit the volatility on I* to a quote file.
    Calibrate {
        #[arg(long, value_name = "PATH")]
        quotes: PathBuf,
    },
    /// Algebraic Dupire inversion on I1*.
    InvertDupire {
        /// Strike-maturity surface file; solves the configured curve if absent.
        #[arg(long, value_name = "PATH")]
        surface: Option<PathBuf>,
    },
    /// Lipschitz stability ratios over the built-in bump family.
    StabilitySweep,
    /// Carleman weight samples and the probe sweep.
    Carleman,
    /// Carleman weight samples and separation constants only.
    Weights,
}

fn run(cli: &Cli) -> anyhow::Result<CommandReport> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Error::Config("--config PATH is required".into()))?;
    let mut cfg = RunConfig::load(path).with_context(|| format!("loading {}", path.display()))?;
    if let Some(f) = cli.resolution_scale {
        cfg = cfg.scaled(f)?;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let out = &cli.out;
    let report = match &cli.command {
        Command::Price { strike } => cli_io::cmd_price(&cfg, strike.unwrap_or(cfg.strike), out)?,
        Command::Dupire => cli_io::cmd_dupire(&cfg, out)?,
        Command::Synthesize { noise } => cli_io::cmd_synthesize(&cfg, noise.unwrap_or(cfg.inverse.noise_level), out)?,
        Command::Calibrate { quotes } => cli_io::cmd_calibrate(&cfg, quotes, out)?,
        Command::InvertDupire { surface } => cli_io::cmd_invert_dupire(&cfg, surface.as_deref(), out)?,
        Command::StabilitySweep => cli_io::cmd_stability_sweep(&cfg, out)?,
        Command::Carleman => cli_io::cmd_carleman(&cfg, out)?,
        Command::Weights => cli_io::cmd_weights(&cfg, out)?,
    };
    Ok(report)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(report) => {
            for w in &report.warnings {
                eprintln!("{w}");
            }
            for m in &report.messages {
                println!("{m}");
            }
            for f in &report.files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e.downcast_ref::<Error>().map_or(2, cli_io::exit_code);
            ExitCode::from(code as u8)
        }
    }
}
