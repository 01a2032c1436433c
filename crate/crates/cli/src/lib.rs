//! Command-line front end for the three-level ANPC loss model.
//!
//! The binary `anpc` is a thin wrapper around [`run`]; the modules are public
//! so that tests can parse what the commands write.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use commands::{CurveEdge, Outcome};
use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "anpc", version, about = "Loss analysis of a three-level ANPC inverter leg")]
pub struct Cli {
    /// Config file with dotted keys; later files override earlier ones.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Vec<PathBuf>,
    /// Output directory (same as `--set output.dir=DIR`).
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Relative error threshold for `compare` (same as `--set compare.threshold=X`).
    #[arg(long, global = true, value_name = "FRACTION")]
    pub threshold: Option<f64>,
    /// Override one config key, e.g. `--set operating.m=0.8`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EdgeArg {
    On,
    Off,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analytic loss report per strategy.
    Analyze,
    /// Analytic model against the gate-level simulator.
    Compare,
    /// Analytic reports over a grid of m, cos φ and peak current.
    Sweep,
    /// Simulated loss report, optionally with waveforms.
    Simulate,
    /// Fit a power-law energy curve to `current_a,energy_j` samples.
    FitEnergy {
        samples: PathBuf,
        /// Which curve the samples describe.
        #[arg(long, value_enum)]
        edge: EdgeArg,
    },
    /// Reference, carriers and gate signals over one fundamental period.
    Patterns {
        /// Single strategy instead of the configured list.
        #[arg(long)]
        strategy: Option<String>,
    },
    /// List every config key with its default.
    Keys,
}

fn overrides(cli: &Cli) -> Vec<String> {
    let mut v = cli.set.clone();
    if let Some(out) = &cli.out {
        v.push(format!("output.dir={}", toml::Value::String(out.to_string_lossy().into_owned())));
    }
    if let Some(t) = cli.threshold {
        v.push(format!("compare.threshold={}", toml::Value::Float(t)));
    }
    v
}

/// Runs one command, writing its files and console text.
pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    if let Command::Keys = cli.command {
        for (key, default) in config::known_keys() {
            let _ = writeln!(stdout, "{key} = {default}");
        }
        return Ok(());
    }
    let scenario = config::load(&cli.config, &overrides(cli))?.resolve()?;
    let outcome: Outcome = match &cli.command {
        Command::Analyze => commands::analyze(&scenario)?,
        Command::Compare => commands::compare(&scenario)?,
        Command::Sweep => commands::sweep(&scenario)?,
        Command::Simulate => commands::simulate_cmd(&scenario)?,
        Command::FitEnergy { samples, edge } => {
            let edge = match edge {
                EdgeArg::On => CurveEdge::On,
                EdgeArg::Off => CurveEdge::Off,
            };
            commands::fit_energy(&scenario, samples, edge)?
        }
        Command::Patterns { strategy } => commands::patterns(&scenario, strategy.as_deref())?,
        Command::Keys => unreachable!(),
    };
    for (path, bytes) in &outcome.files {
        output::write_file(path, bytes)?;
    }
    let _ = write!(stdout, "{}", outcome.console);
    for (path, _) in &outcome.files {
        let _ = writeln!(stdout, "wrote {}", path.display());
    }
    match outcome.failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}
