//! Command-line front end.
//!
//! Every verb reads CSV, writes one report (JSON or CSV) and returns a stable exit code:
//! 0 success, 1 input error, 2 non-convergence, 3 propriety hard failure, 4 injectivity failure.
//!
//! # Inputs
//!
//! Data files are UTF-8 CSV with `.` decimals and LF or CRLF line ends; a header row is
//! optional and `#` starts a comment line. One column holds point observations; two
//! columns `lo,hi` hold interval observations, an empty cell meaning `−∞` or `+∞`.
//! `hier` reads two columns `y,sigma`.
//!
//! # Priors
//!
//! `--prior key=marginal` overrides one entry of the benchmark prior and may be repeated.
//! Keys are `mu`, `sigma`, `gamma`, `delta`, `zeta`; marginals are
//! `uniform(a,b)`, `normal(m,s)`, `half_cauchy(s)`, `point(v)`, `flat(a,b)`, `reciprocal`,
//! `induced` or `induced(a,b)` (the κ-uniform δ prior, optionally truncated) and
//! `tabulated(x:lnf x:lnf ...)`. `inf` and `-inf` are accepted as bounds.
//!
//! # Config files
//!
//! `--config path` reads `key=value` lines using the long flag names (`burn-in` or `burn_in`)
//! and `prior.<param>=marginal`. Precedence is flags, then the config file, then defaults.
//!
//! # Reports
//!
//! Reports embed the artifact version, seed, family, kind, the SHA-256 of the effective
//! configuration and the configuration itself. CSV reports carry these as `# key=value`
//! header comments. Files are written atomically (temporary file, then rename).

mod commands;
mod input;
mod report;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::Error;

pub use input::{parse_hier_csv, parse_observations_csv};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NON_CONVERGENCE: i32 = 2;
pub const EXIT_PROPRIETY: i32 = 3;
pub const EXIT_INJECTIVITY: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "dtp", version, about = "Double two-piece distributions: fitting, measures, priors and model comparison")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: GlobalArgs,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// Base family (normal, student_t, exp_power, sas_symmetric, johnson_su_symmetric, smn_bs, laplace).
    #[arg(long, global = true)]
    pub family: Option<String>,
    /// Asymmetry mechanism (dtp, tpsc, tpsh, symmetric).
    #[arg(long, global = true)]
    pub kind: Option<String>,
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Report path; standard output when absent.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// MCMC iterations, burn-in included.
    #[arg(long, global = true)]
    pub iterations: Option<usize>,
    #[arg(long = "burn-in", global = true)]
    pub burn_in: Option<usize>,
    #[arg(long, global = true)]
    pub thin: Option<usize>,
    /// Optimizer restarts.
    #[arg(long, global = true)]
    pub restarts: Option<usize>,
    /// Prior override `key=marginal`; repeatable.
    #[arg(long = "prior", global = true)]
    pub prior: Vec<String>,
    /// Worker threads; all cores when absent.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// `key=value` configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

/// DTP parameters in natural form; omitted right-hand values copy the left ones.
#[derive(Debug, Clone, Args, Serialize)]
pub struct ParamArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub mu: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma1: f64,
    #[arg(long)]
    pub sigma2: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub delta1: f64,
    #[arg(long)]
    pub delta2: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Maximum likelihood fit with AIC and BIC.
    FitMle,
    /// Posterior sampling with summaries.
    FitBayes {
        /// Also write the draw matrix as CSV.
        #[arg(long)]
        draws: Option<PathBuf>,
    },
    /// AG, the CJ curve on a 99-point grid and κ for given parameters.
    Measures {
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Tabulate the κ-uniform induced prior on δ.
    PriorInduce {
        /// Table rows.
        #[arg(long, default_value_t = 2001)]
        nodes: usize,
    },
    /// Posterior-propriety audit for data and prior.
    Propriety,
    /// Likelihood and Bayes-factor comparison of several models.
    Compare {
        /// Comma-separated `family:kind` list, reference first; the DTP, TPSC, TPSH trio of --family when absent.
        #[arg(long, value_delimiter = ',')]
        models: Vec<String>,
        /// Comma-separated competitor list (s_jf, s_ac).
        #[arg(long, value_delimiter = ',')]
        competitors: Vec<String>,
        /// Importance-sampling draws for non-nested pairs.
        #[arg(long, default_value_t = 20_000)]
        is_draws: usize,
    },
    /// Hierarchical random-effects fit with a predictive grid.
    Hier {
        /// Effects law (normal, sas, tpsc_normal, tpsc_sas, tpsh_sas, dtp_sas).
        #[arg(long, default_value = "tpsc_sas")]
        law: String,
        #[arg(long, default_value_t = 401)]
        grid_points: usize,
        #[arg(long, allow_negative_numbers = true)]
        grid_lo: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        grid_hi: Option<f64>,
    },
    /// Draw from a DTP distribution.
    Sample {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 1000)]
        n: usize,
    },
}

impl Command {
    pub fn verb(&self) -> &'static str {
        match self {
            Command::FitMle => "fit-mle",
            Command::FitBayes { .. } => "fit-bayes",
            Command::Measures { .. } => "measures",
            Command::PriorInduce { .. } => "prior-induce",
            Command::Propriety => "propriety",
            Command::Compare { .. } => "compare",
            Command::Hier { .. } => "hier",
            Command::Sample { .. } => "sample",
        }
    }
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError { code: EXIT_INPUT, message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NonConvergence(_) | Error::Degenerate(_) => EXIT_NON_CONVERGENCE,
            Error::Injectivity(_) => EXIT_INJECTIVITY,
            Error::Domain(_) | Error::Bracket(_) | Error::Representation(_) | Error::Input(_) => EXIT_INPUT,
        };
        CliError { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::input(format!("I/O error: {e}"))
    }
}

/// Parses `args` (program name first), runs the verb and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match commands::execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("dtp: {}", e.message);
            e.code
        }
    }
}
