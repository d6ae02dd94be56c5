//! Command-line front end: `cluster`, `sweep` and `prob`.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 I/O error.

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

mod commands;

pub use commands::{RunManifest, CONNECTION_FILE, MANIFEST_FILE, OPTIMIZED_K_FILE};

#[derive(Debug, Parser)]
#[command(
    name = "vanet",
    version,
    about = "Clustering and connectivity simulator for vehicular networks"
)]
pub struct Cli {
    /// Worker threads; results do not depend on this value.
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    pub threads: Option<u16>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cluster every street of a scenario and write the structures as JSON.
    Cluster(ClusterArgs),
    /// Run the cluster-count and connection-probability sweeps.
    Sweep(SweepArgs),
    /// Evaluate the closed-form connection probabilities.
    Prob(ProbArgs),
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    /// Scenario file (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Placement seed; overrides the seed in the config.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory; one JSON document per line on stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Extra K-means restarts.
    #[arg(long, default_value_t = 0)]
    pub restarts: usize,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Scenario file whose streets form the road for the probability sweep.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Monte Carlo trials per grid point.
    #[arg(long, default_value_t = vanet_core::experiments::DEFAULT_TRIALS,
          value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    /// Coverage radii, meters.
    #[arg(long, value_delimiter = ',')]
    pub radii: Option<Vec<f64>>,
    /// Street lengths for the cluster-count sweep, meters.
    #[arg(long, value_delimiter = ',')]
    pub lengths: Option<Vec<f64>>,
    /// Vehicles per meter.
    #[arg(long)]
    pub density: Option<f64>,
    /// Number of placement seeds to average over.
    #[arg(long, default_value_t = vanet_core::experiments::DEFAULT_SEED_COUNT,
          value_parser = parse_positive_usize)]
    pub seeds: usize,
    #[arg(long, default_value_t = 0)]
    pub restarts: usize,
    #[arg(long, default_value = "results")]
    pub out: PathBuf,
    /// Also write JSON copies of both tables.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ProbArgs {
    #[arg(long, default_value_t = vanet_core::experiments::DEFAULT_DENSITY)]
    pub density: f64,
    #[arg(long)]
    pub radius: f64,
    /// Vehicles on the street.
    #[arg(short)]
    pub n: usize,
    /// Multi-member clusters.
    #[arg(short)]
    pub k: usize,
    /// Singletons.
    #[arg(short)]
    pub m: usize,
}

fn parse_positive_usize(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "error: {msg}"),
            CliError::Io(msg) => write!(f, "I/O error: {msg}"),
        }
    }
}

impl From<vanet_core::Error> for CliError {
    fn from(e: vanet_core::Error) -> Self {
        if e.is_io() {
            CliError::Io(e.to_string())
        } else {
            CliError::Usage(e.to_string())
        }
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let pool = {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = cli.threads {
            builder = builder.num_threads(n as usize);
        }
        builder
            .build()
            .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?
    };
    pool.install(|| match cli.command {
        Command::Cluster(args) => commands::cluster(&args),
        Command::Sweep(args) => commands::sweep(&args),
        Command::Prob(args) => commands::prob(&args),
    })
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
