//! Command-line front end: JSON configs in, CSV tables and JSON sidecars out.
//!
//! Exit status 0 on success, 1 on numerical failure (an `error.json` record is written to the
//! output directory), 2 on configuration errors.

mod commands;
mod config;
mod output;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

pub use config::{
    CommandName, DiscreteParams, EigsParams, FunctionalParams, MEvalParams, Method, ProblemSpec, RunConfig, ScanParams,
};
pub use output::{csv_text, write_atomic, Cell, OutputError};

use crate::error::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(#[from] Error),
    #[error(transparent)]
    Output(#[from] OutputError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) | CliError::Output(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "indefinite-sl", version, about = "m-coefficients and similarity criteria for indefinite Sturm-Liouville operators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Evaluate m₊ and m₋ at the configured points.
    MEval(Common),
    /// Scan the ratio near a critical point.
    CriterionScan(Common),
    /// Run every criterion and write a report.
    Classify(Common),
    /// Build finite-zone polynomials.
    ZoneBuild(Common),
    /// Locate nonreal eigenvalues in a rectangle.
    EigsFind(Common),
    /// Spectrum of the finite-difference operator.
    DiscreteSpectrum(Common),
    /// Resolvent functional ladder of the finite-difference operator.
    DiscreteFunctional(Common),
}

#[derive(Debug, Args)]
pub struct Common {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub threads: Option<usize>,
}

impl Sub {
    fn parts(&self) -> (CommandName, &Common) {
        match self {
            Sub::MEval(c) => (CommandName::MEval, c),
            Sub::CriterionScan(c) => (CommandName::CriterionScan, c),
            Sub::Classify(c) => (CommandName::Classify, c),
            Sub::ZoneBuild(c) => (CommandName::ZoneBuild, c),
            Sub::EigsFind(c) => (CommandName::EigsFind, c),
            Sub::DiscreteSpectrum(c) => (CommandName::DiscreteSpectrum, c),
            Sub::DiscreteFunctional(c) => (CommandName::DiscreteFunctional, c),
        }
    }
}

/// Runs one command on a parsed config.
pub fn run(cmd: CommandName, cfg: &RunConfig, out: &Path, seed: Option<u64>) -> Result<(), CliError> {
    cfg.validate(cmd).map_err(|e| CliError::Config(e.to_string()))?;
    let ctx = commands::Ctx {
        cmd,
        cfg,
        out,
        seed: seed.or(cfg.seed).unwrap_or(0),
    };
    match cmd {
        CommandName::MEval => commands::m_eval(&ctx),
        CommandName::CriterionScan => commands::criterion_scan(&ctx),
        CommandName::Classify => commands::classify_cmd(&ctx),
        CommandName::ZoneBuild => commands::zone_build(&ctx),
        CommandName::EigsFind => commands::eigs_find(&ctx),
        CommandName::DiscreteSpectrum => commands::discrete_spectrum(&ctx),
        CommandName::DiscreteFunctional => commands::discrete_functional(&ctx),
    }
}

fn variant_name(e: &CliError) -> String {
    match e {
        CliError::Numerical(inner) => {
            let d = format!("{inner:?}");
            d.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("").to_string()
        }
        CliError::Output(_) => "Output".into(),
        CliError::Config(_) => "Config".into(),
    }
}

fn load(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    RunConfig::parse(&text).map_err(|e| CliError::Config(e.to_string()))
}

fn execute(cmd: CommandName, common: &Common) -> Result<(), CliError> {
    let cfg = load(&common.config)?;
    let go = || run(cmd, &cfg, &common.out, common.seed);
    match common.threads {
        Some(0) => Err(CliError::Config("--threads must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?
            .install(go),
        None => go(),
    }
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
            return e.exit_code();
        }
    };
    let (cmd, common) = cli.command.parts();
    match execute(cmd, common) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.exit_code() == 1 {
                let record = json!({
                    "status": "numerical_failure",
                    "command": cmd.as_str(),
                    "kind": variant_name(&e),
                    "message": e.to_string(),
                });
                if let Err(w) = output::write_json(&common.out.join("error.json"), &record) {
                    eprintln!("error: {w}");
                }
            }
            e.exit_code()
        }
    }
}
