//! `quenchcorr`: point queries, sweeps, figure grids and oracle runs.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{CommonArgs, Extra, Observable, RunConfig};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
    Oracle(String),
    Io(PathBuf, std::io::Error),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(..) => 2,
            CliError::Numerical(_) => 3,
            CliError::Oracle(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical error: {m}"),
            CliError::Oracle(m) => write!(f, "oracle check failed: {m}"),
            CliError::Io(p, e) => write!(f, "{}: {e}", p.display()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(PathBuf::from("<stdout>"), e)
    }
}

#[derive(Parser)]
#[command(
    name = "quenchcorr",
    version,
    about = "Quantum correlations after a coupling quench in the transverse XY chain"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Magnetization and nearest-neighbour correlators at one point
    Corr {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Concurrence, discord and mutual information at one point
    Qcorr {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Observables over a grid of up to two parameters plus time
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// name=start:stop:count, with name one of j1, j2, gamma, h, beta, t
        #[arg(long)]
        axis: Vec<String>,
        /// Comma-separated list of C, D, I, dC, dD, mz, txx, tyy, tzz, txy
        #[arg(long)]
        observable: Vec<String>,
        /// Continue a partially written --out file
        #[arg(long)]
        resume: bool,
    },
    /// Data grids behind the published figures, one CSV per panel in --out
    Figure {
        /// fig2, fig3, fig4, fig5 or fig6
        name: String,
        #[command(flatten)]
        common: CommonArgs,
        /// Largest time on the fig2/fig3 time axis
        #[arg(long)]
        t_max: Option<f64>,
        /// Grid points per axis
        #[arg(long)]
        points: Option<usize>,
    },
    /// Compare the closed forms against the mode-level and spin-chain oracles
    Oracle {
        #[command(flatten)]
        common: CommonArgs,
        /// Chain lengths for the spin ED suite, e.g. 8,10,12
        #[arg(long, value_delimiter = ',')]
        n: Option<Vec<usize>>,
        /// Seed of the random mode-level suite
        #[arg(long)]
        seed: Option<u64>,
        /// Number of random mode-level points
        #[arg(long)]
        points: Option<usize>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let resolve = |common: &CommonArgs, extra| RunConfig::resolve(common, extra).map_err(CliError::Config);
    match cli.command {
        Command::Corr { common } => commands::point(&resolve(&common, Extra::default())?, &Observable::CORRELATORS),
        Command::Qcorr { common } => commands::point(&resolve(&common, Extra::default())?, &Observable::MEASURES),
        Command::Sweep { common, axis, observable, resume } => {
            let cfg = resolve(&common, Extra { axis, observable, ..Default::default() })?;
            let obs = cfg.observables.clone().unwrap_or_else(|| Observable::MEASURES.to_vec());
            commands::sweep(&cfg, &obs, resume)
        }
        Command::Figure { name, common, t_max, points } => {
            // Figures fix their own couplings, so --j1 is not required.
            let common = CommonArgs { j1: common.j1.or(Some(0.0)), ..common };
            let cfg = resolve(&common, Extra { t_max, points, ..Default::default() })?;
            for path in commands::figure(&cfg, &name)? {
                eprintln!("wrote {}", path.display());
            }
            Ok(())
        }
        Command::Oracle { common, n, seed, points } => {
            let common = CommonArgs { j1: common.j1.or(Some(0.0)), ..common };
            commands::oracle(&resolve(&common, Extra { seed, points, sizes: n, ..Default::default() })?)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
