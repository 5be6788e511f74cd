//! Batch front end for the hedging engine: price payoffs, optimize
//! rebalancing grids, run Monte Carlo cross-checks, and reproduce the
//! bundled reference tables and figure data as CSV.

mod commands;
mod config;
mod output;
mod reference;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::RunConfig;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Engine(vohedge::Error),
}

impl From<vohedge::Error> for CliError {
    fn from(e: vohedge::Error) -> Self {
        CliError::Engine(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Engine(e) => write!(f, "{e}"),
        }
    }
}

impl CliError {
    /// 2 config error, 3 assumption violation, 4 numerics failure.
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Engine(e) => match e {
                vohedge::Error::Parameter(_) => 2,
                vohedge::Error::Domain { .. } | vohedge::Error::Assumption(_) => 3,
                vohedge::Error::Numerics(_) | vohedge::Error::Solver(_) => 4,
            },
        }
    }
}

#[derive(Parser)]
#[command(name = "vohedge", about = "Discrete-time variance-optimal hedging engine", version)]
struct Cli {
    /// Cap on worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output CSV path (stdout when omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Initial capital and hedging-error variance for a configured run.
    Price {
        #[arg(long)]
        config: PathBuf,
    },
    /// Optimal rebalancing grids: parametric b*, free dates, or a b-sweep.
    OptimizeGrid {
        #[arg(long)]
        config: PathBuf,
        /// Emit (b, std) rows over `lo:hi:steps` instead of optimizing.
        #[arg(long)]
        sweep_b: Option<String>,
    },
    /// Monte Carlo hedging errors for every strategy, against analytic values.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Seed override.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Reference tables (1-4) and figure data (1-6) as CSV with deviations.
    Reproduce {
        #[arg(long)]
        table: Option<u32>,
        #[arg(long)]
        figure: Option<u32>,
    },
}

fn parse_sweep(s: &str) -> Result<(f64, f64, usize), CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::Config(format!("--sweep-b expects lo:hi:steps, got {s:?}")));
    }
    let lo: f64 = parts[0].parse().map_err(|_| CliError::Config("bad sweep lo".into()))?;
    let hi: f64 = parts[1].parse().map_err(|_| CliError::Config("bad sweep hi".into()))?;
    let steps: usize = parts[2].parse().map_err(|_| CliError::Config("bad sweep steps".into()))?;
    if !(lo > 0.0 && hi <= 1.0 && lo < hi && steps >= 2) {
        return Err(CliError::Config("sweep needs 0 < lo < hi <= 1 and steps >= 2".into()));
    }
    Ok((lo, hi, steps))
}

fn run(cli: &Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be >= 1".into()));
        }
        // ignore the error when a pool already exists (tests)
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Price { config } => {
            let cfg = RunConfig::load(config)?;
            commands::price(&cfg, out.or(cfg.output.path.as_ref().map(std::path::Path::new)))
        }
        Command::OptimizeGrid { config, sweep_b } => {
            let cfg = RunConfig::load(config)?;
            let sweep = sweep_b.as_deref().map(parse_sweep).transpose()?;
            commands::optimize_grid(
                &cfg,
                out.or(cfg.output.path.as_ref().map(std::path::Path::new)),
                sweep,
            )
        }
        Command::Simulate { config, seed } => {
            let cfg = RunConfig::load(config)?;
            commands::simulate(
                &cfg,
                out.or(cfg.output.path.as_ref().map(std::path::Path::new)),
                *seed,
            )
        }
        Command::Reproduce { table, figure } => commands::reproduce(*table, *figure, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
