//! The `harmlab` command line: experiments on exit measures of random walks
//! on groups, written as CSV, TSV and JSON files.
//!
//! Exit status: 0 when every check passes, 1 when an invariant check fails,
//! 2 for bad input, 3 when a size or exactness cap stops a run.

pub mod config;
pub mod output;
pub mod presets;
pub mod run;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use config::{load_config, Experiment, ExperimentConfig, Overrides};
use output::Sink;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Resource(String),
    #[error("{0}")]
    Solver(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl RunError {
    pub fn status(&self) -> i32 {
        match self {
            RunError::Input(_) | RunError::Io(_) => 2,
            RunError::Resource(_) => 3,
            RunError::Solver(_) => 1,
        }
    }
}

impl From<harmlab::Error> for RunError {
    fn from(e: harmlab::Error) -> Self {
        use harmlab::Error as E;
        match e {
            E::SizeCap { .. } | E::ExactTooLarge { .. } => RunError::Resource(e.to_string()),
            E::Singular(_) | E::ZeroExit(_) | E::Cache(_) => RunError::Solver(e.to_string()),
            E::Io(io) => RunError::Io(io),
            e => RunError::Input(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "harmlab", version, about = "Exit measures, discrepancy scans and growth certificates for random walks on groups")]
#[command(after_help = "Set HARMLAB_CACHE_DIR to reuse built balls across runs.")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Enumerate B(a, radius-max) and its boundary
    Ball,
    /// Solve the exit measure of B(a, radius-max) and check its invariants
    Exit,
    /// Scan eps(B(a, r); a, b) over the radius range
    EpsilonScan,
    /// Ball and boundary sizes up to radius-max, with a growth classification
    Growth,
    /// Check the one-step premise and the exit-probability bound up to radius-max
    Certify,
    /// Randomized monotonicity checks on nested balls
    Lemma2,
    /// Geodesic ratio chains on every boundary vertex
    Telescope,
    /// Simulate exits from B(a, radius-max) and compare with the solver
    Simulate,
    /// Grigorchuk balls with exit-measure and harmonic-function checks
    ProbeGrigorchuk,
    /// List the built-in presets
    Presets,
    /// Run a built-in preset
    Run {
        preset: String,
    },
}

impl Command {
    fn experiment(&self) -> Option<Experiment> {
        Some(match self {
            Command::Ball => Experiment::Ball,
            Command::Exit => Experiment::Exit,
            Command::EpsilonScan => Experiment::EpsilonScan,
            Command::Growth => Experiment::Growth,
            Command::Certify => Experiment::Certify,
            Command::Lemma2 => Experiment::Lemma2,
            Command::Telescope => Experiment::Telescope,
            Command::Simulate => Experiment::Simulate,
            Command::ProbeGrigorchuk => Experiment::ProbeGrigorchuk,
            Command::Presets | Command::Run { .. } => return None,
        })
    }
}

/// Runs configurations in order, stopping at the first error.
pub fn run_configs(configs: &[ExperimentConfig]) -> Result<Vec<String>, RunError> {
    let mut failures = Vec::new();
    for cfg in configs {
        let mut sink = Sink::new(&cfg.out);
        let report = run::run(cfg, &mut sink)?;
        for line in &report.lines {
            println!("{line}");
        }
        for f in &report.failures {
            eprintln!("FAIL {f}");
        }
        failures.extend(report.failures);
    }
    Ok(failures)
}

/// Configurations for a preset, with `out` nested under the preset name and
/// explicit flags applied on top.
pub fn preset_configs(name: &str, overrides: &Overrides) -> Result<Vec<ExperimentConfig>, RunError> {
    let configs = presets::preset(name).ok_or_else(|| RunError::Input(format!("unknown preset `{name}`")))?;
    let base_out = overrides.out.clone().unwrap_or_else(|| ExperimentConfig::default().out);
    configs
        .into_iter()
        .map(|mut c| {
            overrides.apply(&mut c)?;
            c.out = base_out.join(name);
            Ok(c)
        })
        .collect()
}

fn configs_for(cli: &Cli) -> Result<Vec<ExperimentConfig>, RunError> {
    if let Command::Run { preset } = &cli.command {
        return preset_configs(preset, &cli.overrides);
    }
    let mut cfg = match &cli.overrides.config {
        Some(path) => load_config(path)?,
        None if matches!(cli.command, Command::ProbeGrigorchuk) => {
            ExperimentConfig { group: "grigorchuk".into(), ..ExperimentConfig::default() }
        }
        None => ExperimentConfig::default(),
    };
    if let Some(e) = cli.command.experiment() {
        cfg.experiment = e;
    }
    cli.overrides.apply(&mut cfg)?;
    Ok(vec![cfg])
}

/// Parses arguments, runs, and returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Command::Presets = cli.command {
        let mut out = std::io::stdout().lock();
        for p in presets::PRESETS {
            if writeln!(out, "{:<20} {}", p.name, p.summary).is_err() {
                break;
            }
        }
        return 0;
    }
    let result = configs_for(&cli).and_then(|configs| run_configs(&configs));
    match result {
        Ok(failures) if failures.is_empty() => 0,
        Ok(_) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            e.status()
        }
    }
}

/// Default output directory.
pub fn default_out() -> PathBuf {
    ExperimentConfig::default().out
}
