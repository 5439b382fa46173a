//! Command-line front end for clockrace.

pub mod commands;
pub mod config;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use config::RunFile;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Stalled(String),
    #[error("{failed} of {total} checks failed")]
    ChecksFailed { failed: usize, total: usize },
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Simulation(#[from] clockrace_core::KernelError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Input(_) => 2,
            CliError::Stalled(_) => 3,
            CliError::ChecksFailed { .. } | CliError::Io(_) | CliError::Simulation(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "clockrace", version, about = "Exact simulation of competing clocks with general hazards")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate an ensemble and write one trajectory file per run.
    Run(RunArgs),
    /// Run a statistical check suite and print a pass/fail table.
    Verify(VerifyArgs),
    /// Tabulate an observable over trajectory files.
    Summarize(SummarizeArgs),
    /// Print a model's clock/substate dependency edges.
    Graph(ModelArgs),
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long, env = "CLOCKRACE_MODEL")]
    pub model: Option<String>,
    /// Model parameter as key=value; repeatable.
    #[arg(long = "param", env = "CLOCKRACE_PARAM", value_delimiter = ';', value_name = "KEY=VALUE")]
    pub params: Vec<String>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// TOML file with run settings; flags take precedence.
    #[arg(long, env = "CLOCKRACE_CONFIG")]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, env = "CLOCKRACE_SAMPLER")]
    pub sampler: Option<String>,
    #[arg(long, env = "CLOCKRACE_SEED")]
    pub seed: Option<u64>,
    #[arg(long, env = "CLOCKRACE_TRAJECTORIES")]
    pub trajectories: Option<usize>,
    #[arg(long, env = "CLOCKRACE_T_END", conflicts_with = "max_events")]
    pub t_end: Option<f64>,
    #[arg(long, env = "CLOCKRACE_MAX_EVENTS")]
    pub max_events: Option<u64>,
    /// Directory for trajectory files and the manifest.
    #[arg(long, env = "CLOCKRACE_OUTPUT")]
    pub output: Option<PathBuf>,
    #[arg(long, env = "CLOCKRACE_WORKERS")]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// distributions, sampler-equivalence, oracle or all.
    pub suite: String,
    #[arg(long, env = "CLOCKRACE_SEED")]
    pub seed: Option<u64>,
    #[arg(long, env = "CLOCKRACE_WORKERS")]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Observable {
    EventCount,
    FinalState,
    Interarrival,
}

#[derive(Debug, Args)]
pub struct SummarizeArgs {
    /// Trajectory files, or directories holding `traj_*.tsv` files.
    pub paths: Vec<PathBuf>,
    #[arg(long, value_enum, env = "CLOCKRACE_OBSERVABLE", default_value = "event-count")]
    pub observable: Observable,
}

fn parse_params(pairs: &[String]) -> Result<BTreeMap<String, toml::Value>, CliError> {
    pairs
        .iter()
        .map(|pair| match pair.split_once('=') {
            Some((k, v)) if !k.is_empty() => Ok((k.to_string(), toml::Value::String(v.to_string()))),
            _ => Err(CliError::Config(format!("--param expects key=value, got `{pair}`"))),
        })
        .collect()
}

impl RunArgs {
    pub fn to_file(&self) -> Result<RunFile, CliError> {
        Ok(RunFile {
            model: self.model.model.clone(),
            sampler: self.sampler.clone(),
            seed: self.seed,
            trajectories: self.trajectories,
            t_end: self.t_end,
            max_events: self.max_events,
            output: self.output.clone(),
            workers: self.workers,
            params: parse_params(&self.model.params)?,
        })
    }
}

/// Parses `args` and runs the command, writing reports to `out`. Returns the
/// process exit code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code() as u8;
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Run(args) => commands::run(args, out),
        Command::Verify(args) => commands::verify(args, out),
        Command::Summarize(args) => commands::summarize(args, out),
        Command::Graph(args) => commands::graph(args, out),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
