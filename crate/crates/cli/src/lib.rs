//! Command-line front end for `asymlab`: loads an instance bundle, routes a
//! command over its instances and emits a reproducible report.

// `!(eps > 0.0)` is deliberate: NaN must fail it.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod bundle;
pub mod commands;
pub mod error;
pub mod suite;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub use bundle::Bundle;
pub use error::{CliError, CliResult};

pub const SEED_ENV: &str = "ASYMLAB_SEED";

#[derive(Debug, Parser)]
#[command(name = "asymlab", version, about = "Asymmetric normed spaces and compact operators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Instance bundle (JSON).
    #[arg(long, global = true)]
    pub input: Option<std::path::PathBuf>,

    /// Seed for sampling and property runs; `ASYMLAB_SEED` wins when set.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, global = true, default_value_t = asymlab::tol::DEFAULT_TOL)]
    pub tol: f64,

    /// Worker threads.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,

    /// Radius; repeat for sweeps.
    #[arg(long, global = true)]
    pub epsilon: Vec<f64>,

    /// Denominator of the barycentric grid over the polar.
    #[arg(long, global = true, default_value_t = asymlab::duality::DEFAULT_GRID_DENSITY)]
    pub grid_density: usize,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Restrict the run to one instance id.
    #[arg(long, global = true)]
    pub id: Option<String>,

    /// Trials per property check (property-suite only).
    #[arg(long, global = true)]
    pub trials: Option<usize>,

    /// Print wall time to stderr.
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Check AN1 for every norm and the flags of every table.
    ValidateNorm,
    /// Evaluate p, its conjugate and its symmetrisation on point sets.
    Eval,
    /// Operator norms for all nine (mu, nu) pairs.
    OpNorm,
    /// Semi-Lipschitz boundedness and the least constant.
    CheckBounded,
    /// Compactness verdict with a recession witness or a net.
    CheckCompact,
    /// Greedy and exact epsilon-nets of point sets.
    BuildNet,
    /// Net numbers against cover numbers over an epsilon sweep.
    CoverVsNet,
    /// Cauchy taxonomy of sequence prefixes.
    ClassifySequence,
    /// Vertex form of the dual unit ball.
    Polar,
    /// Dual operator images and the dual continuity radius.
    DualOp,
    /// Net certificate for the dual image of the polar.
    SchauderCheck,
    /// Seeded invariant battery.
    PropertySuite,
}

impl Command {
    pub fn name(self) -> String {
        serde_json::to_value(self).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceResult {
    pub id: String,
    pub result: serde_json::Value,
}

/// Everything needed to reproduce a run, and its results.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub command: String,
    pub tool_version: String,
    pub seed: u64,
    pub tolerance: f64,
    pub inputs: Vec<String>,
    pub results: Vec<InstanceResult>,
}

/// The effective seed: the environment override, else the flag.
pub fn effective_seed(flag: u64) -> CliResult<u64> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{SEED_ENV}={v} is not an unsigned integer"))),
        Err(_) => Ok(flag),
    }
}

/// Runs a parsed command line and renders its output.
pub fn execute(cli: &Cli) -> CliResult<String> {
    let seed = effective_seed(cli.seed)?;
    if !(cli.tol >= 0.0) {
        return Err(CliError::Usage(format!("--tol must be nonnegative, got {}", cli.tol)));
    }
    if cli.jobs == 0 {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    if let Some(e) = cli.epsilon.iter().find(|e| !(**e > 0.0) || !e.is_finite()) {
        return Err(CliError::Usage(format!("--epsilon must be positive, got {e}")));
    }
    if cli.grid_density == 0 {
        return Err(CliError::Usage("--grid-density must be positive".into()));
    }
    let bundle = match (&cli.input, cli.command) {
        (_, Command::PropertySuite) => None,
        (Some(path), _) => Some(Bundle::from_json(&std::fs::read_to_string(path)?)?),
        (None, _) => return Err(CliError::Usage("--input is required for this command".into())),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs)
        .build()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let ctx = commands::Context { seed, tol: cli.tol, epsilons: cli.epsilon.clone(), grid_density: cli.grid_density };
    let output = pool.install(|| commands::dispatch(cli.command, bundle.as_ref(), cli.id.as_deref(), cli.trials, &ctx))?;
    match (cli.format, output.csv) {
        (Format::Csv, Some(csv)) => Ok(csv),
        (Format::Csv, None) => Err(CliError::Usage("--format csv is only available for cover-vs-net".into())),
        (Format::Json, _) => {
            let report = RunReport {
                command: cli.command.name(),
                tool_version: env!("CARGO_PKG_VERSION").to_string(),
                seed,
                tolerance: cli.tol,
                inputs: output.results.iter().map(|r| r.id.clone()).collect(),
                results: output.results,
            };
            Ok(serde_json::to_string_pretty(&report).expect("reports serialize") + "\n")
        }
    }
}
