//! Command-line front end. Every command writes into its own output
//! directory together with a `manifest.json`.
//!
//! Exit codes: 0 ok, 1 usage, 2 validation, 3 divergence.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand};

use crate::optimizers::{Method, Profile};
use crate::Error;

pub mod commands;
pub mod config;
pub mod manifest;
pub mod svg;

pub use commands::{CompareArgs, DecisionSource, LoadOverride, SimulateArgs, TuneArgs};
pub use config::RunConfig;
pub use manifest::{RunManifest, RunStatus};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Validation(String),
    #[error("simulation diverged at t = {at} s; partial trace written to {}", traces.display())]
    Diverged { at: f64, traces: PathBuf },
    #[error(transparent)]
    Core(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Diverged { .. } => 3,
            CliError::Core(Error::Io { .. }) => 1,
            CliError::Core(_) => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "lfc-tune", version, about = "Three-area load-frequency control: simulate, tune and compare PI controllers")]
pub struct Cli {
    /// Random seed for the stochastic optimizers.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output directory (`nominal-config`: output file, stdout if omitted).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// TOML run configuration; the nominal system when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one decision and write traces and response metrics.
    Simulate(SimulateCli),
    /// Tune the controller with one optimizer.
    Tune(TuneCli),
    /// Re-simulate tuned decisions under a 1 % load step in area 1 and tabulate them.
    Compare(CompareCli),
    /// Print or write the nominal configuration.
    NominalConfig,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("decision_source").required(true).args(["nominal", "decision"])))]
pub struct SimulateCli {
    /// Use the built-in reference decision.
    #[arg(long)]
    pub nominal: bool,
    /// JSON decision file with `kp`, `ki`, `b` and `r` arrays.
    #[arg(long)]
    pub decision: Option<PathBuf>,
    /// Area receiving the load step, counted from 1.
    #[arg(long)]
    pub load_area: Option<usize>,
    /// Load step in pu of the area rating.
    #[arg(long)]
    pub load_pu: Option<f64>,
    /// Time of the load step, s.
    #[arg(long)]
    pub load_time: Option<f64>,
}

#[derive(Debug, Args)]
pub struct TuneCli {
    #[arg(long, value_parser = clap::value_parser!(Method))]
    pub method: Method,
    /// Budget profile; a `[bfo]`, `[pso]` or `[gd]` config section takes precedence.
    #[arg(long, default_value = "desk")]
    pub profile: Profile,
    /// Evaluation cap for pso and gd.
    #[arg(long)]
    pub max_evaluations: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CompareCli {
    /// Directories written by `tune`, usually one per method.
    #[arg(required = true, num_args = 1..)]
    pub runs: Vec<PathBuf>,
    /// Time span shown in the plots, s.
    #[arg(long, default_value_t = 60.0)]
    pub plot_seconds: f64,
}

const DEFAULT_OUT: &str = "out";

impl Cli {
    pub fn execute(self) -> Result<(), CliError> {
        let out = self.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
        match self.command {
            Command::Simulate(s) => commands::simulate_cmd(&SimulateArgs {
                config: self.config,
                decision: match s.decision {
                    Some(p) => DecisionSource::File(p),
                    None => DecisionSource::Reference,
                },
                load: LoadOverride {
                    area: s.load_area,
                    magnitude: s.load_pu,
                    start_time: s.load_time,
                },
                seed: self.seed,
                out,
            }),
            Command::Tune(t) => {
                let result = commands::tune_cmd(&TuneArgs {
                    config: self.config,
                    method: t.method,
                    profile: t.profile,
                    max_evaluations: t.max_evaluations,
                    seed: self.seed,
                    out,
                })?;
                eprintln!(
                    "{}: best cost {} after {} evaluations",
                    result.method.label(),
                    result.best_cost,
                    result.evaluations
                );
                Ok(())
            }
            Command::Compare(c) => {
                if !(c.plot_seconds > 0.0) {
                    return Err(CliError::Usage("--plot-seconds must be > 0".into()));
                }
                commands::compare_cmd(&CompareArgs {
                    runs: c.runs,
                    plot_seconds: c.plot_seconds,
                    seed: self.seed,
                    out,
                })
            }
            Command::NominalConfig => {
                if self.config.is_some() {
                    return Err(CliError::Usage("nominal-config takes no --config".into()));
                }
                if let Some(text) = commands::nominal_config_cmd(self.out.as_deref())? {
                    let mut stdout = std::io::stdout().lock();
                    stdout
                        .write_all(text.as_bytes())
                        .map_err(|e| Error::io("<stdout>", e))?;
                }
                Ok(())
            }
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match cli.execute() {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn main() -> ExitCode {
    ExitCode::from(run(std::env::args_os()))
}
