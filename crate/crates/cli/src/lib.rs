//! Command-line front end: configuration, artifact caching and report emission.
//!
//! Exit status is 0 when every criterion passes, 1 when a criterion fails and
//! 2 for usage, configuration and runtime errors.

pub mod cache;
pub mod commands;
pub mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use opuc_core::Precision;

use crate::config::{parse_n_list, RunConfig, DEFAULT_EPSILON};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{} exists; another command is using this output directory", .0.display())]
    Locked(PathBuf),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("stage {stage} failed: {source}")]
    Stage { stage: &'static str, source: opuc_core::Error },
    #[error("missing {what} at {}; produce it with `{command}`", path.display())]
    MissingArtifact { what: &'static str, path: PathBuf, command: String },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }
}

/// Attaches the stage name to a core error.
pub fn stage<T>(stage: &'static str, r: opuc_core::Result<T>) -> Result<T, CliError> {
    r.map_err(|source| CliError::Stage { stage, source })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PrecisionArg {
    Standard,
    High,
}

impl From<PrecisionArg> for Precision {
    fn from(p: PrecisionArg) -> Self {
        match p {
            PrecisionArg::Standard => Precision::Standard,
            PrecisionArg::High => Precision::High,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    L4,
    L1,
    Growth,
    Identities,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum What {
    /// Columns j, gamma_re, main_re, residual_abs. Needs `extract`.
    GammaVsMain,
    /// Columns theta, w. Needs `construct`.
    Weight,
    /// Columns n, sup, log_n, ratio. Needs `verify --suite growth`.
    SupnormCurve,
}

#[derive(Debug, Parser)]
#[command(name = "opuc", version, about = "Verblunsky coefficients of a two-jump weight and a decoupled Steklov weight")]
pub struct Cli {
    /// Output directory; also holds the cache unless OPUC_CACHE_DIR is set.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Jump strength in (0, 0.3]. Defaults to 0.1; `verify --suite l4` runs 0.05, 0.1 and 0.2 when omitted.
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
    /// Grid size, a positive multiple of 4.
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    #[arg(long, global = true, value_enum, default_value = "standard")]
    pub precision: PrecisionArg,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract Verblunsky coefficients of the two-jump weight into fh_gamma_eps<eps>_N<N>.json.
    Extract {
        #[arg(long, default_value_t = 512)]
        n: usize,
    },
    /// Build the decoupled weight for block size n: weight CSV, scheme JSON and report.
    Construct {
        #[arg(long, default_value_t = 16)]
        n: usize,
    },
    /// Run a verification suite and write verify_<suite>.json.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        /// Extraction length for the l4 suite.
        #[arg(long)]
        n: Option<usize>,
        /// Comma-separated block sizes for the growth and l1 suites.
        #[arg(long)]
        n_list: Option<String>,
        /// Add n = 1024 to the default block sizes.
        #[arg(long)]
        large: bool,
        /// Seed for the random schemes of the identities suite.
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Write tidy CSV for plotting.
    Export {
        #[arg(long, value_enum)]
        what: What,
        #[arg(long)]
        n: Option<usize>,
    },
}

/// Overall result of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    CriterionFailed,
}

impl Cli {
    pub fn config(&self) -> Result<RunConfig, CliError> {
        let (n, n_list, seed) = match &self.command {
            Command::Extract { n } | Command::Construct { n } => (Some(*n), vec![], 0),
            Command::Verify { n, n_list, large, seed, .. } => {
                let mut list = match n_list {
                    Some(s) => parse_n_list(s).map_err(|e| CliError::Config(format!("--n-list {e}")))?,
                    None => config::DEFAULT_N_LIST.to_vec(),
                };
                if *large && !list.contains(&config::LARGE_N) {
                    list.push(config::LARGE_N);
                }
                (*n, list, *seed)
            }
            Command::Export { n, .. } => (*n, vec![], 0),
        };
        RunConfig {
            epsilon: self.epsilon.unwrap_or(DEFAULT_EPSILON),
            n,
            n_list,
            m: self.grid,
            precision: self.precision.into(),
            out_dir: self.out.clone(),
            seed,
        }
        .validate()
    }
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let cfg = cli.config()?;
    let _lock = cache::DirLock::acquire(&cfg.out_dir)?;
    match &cli.command {
        Command::Extract { .. } => commands::cmd_extract(&cfg).map(|_| Outcome::Pass),
        Command::Construct { .. } => commands::cmd_construct(&cfg).map(|_| Outcome::Pass),
        Command::Verify { suite, .. } => {
            let epsilons = match (suite, cli.epsilon) {
                (Suite::L4 | Suite::All, None) => vec![0.05, 0.1, 0.2],
                _ => vec![cfg.epsilon],
            };
            commands::cmd_verify(&cfg, *suite, &epsilons)
        }
        Command::Export { what, .. } => commands::cmd_export(&cfg, *what).map(|_| Outcome::Pass),
    }
}

pub fn main_entry() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::CriterionFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
