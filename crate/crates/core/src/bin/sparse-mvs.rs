//! Command-line front end. Exit codes: 0 converged, 1 error, 2 iteration cap
//! reached, 3 divergence.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sparse_mvs::io::commands::{self, exit, parse_grid, Input};
use sparse_mvs::io::returns_csv::write_returns;
use sparse_mvs::SkewedReturns;

#[derive(Parser)]
#[command(
    name = "sparse-mvs",
    version,
    about = "Sparse mean-variance-skewness portfolio selection"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Returns CSV, one row per period and one column per asset
    #[arg(long)]
    returns: Option<PathBuf>,
    /// Moments file written by `estimate`
    #[arg(long)]
    moments: Option<PathBuf>,
}

impl Source {
    fn input(self) -> Input {
        match (self.returns, self.moments) {
            (Some(r), _) => Input::Returns(r),
            (_, Some(m)) => Input::Moments(m),
            _ => unreachable!("clap enforces one source"),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Estimate mean, covariance and coskewness from a returns CSV
    Estimate {
        returns: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Solve one configuration
    Solve {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        config: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Solve once per lambda4 value
    Sweep {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated, strictly increasing, non-negative
        #[arg(long)]
        lambda4: String,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Check the covariance estimation risk bound for a portfolio
    CheckBound {
        #[arg(long)]
        sigma_hat: PathBuf,
        #[arg(long)]
        sigma: PathBuf,
        #[arg(long)]
        weights: PathBuf,
    },
    /// Write a seeded synthetic skewed returns CSV
    Generate {
        #[arg(long, default_value_t = 10)]
        assets: usize,
        #[arg(long, default_value_t = 500)]
        periods: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    match dispatch(Cli::parse().command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit::ERROR as u8)
        }
    }
}

fn dispatch(command: Command) -> sparse_mvs::Result<i32> {
    match command {
        Command::Estimate { returns, out } => {
            let m = commands::cmd_estimate(&returns, &out)?;
            println!("wrote moments for {} assets to {}", m.n(), out.display());
            Ok(exit::TOLERANCE)
        }
        Command::Solve {
            source,
            config,
            out,
        } => {
            let art = commands::cmd_solve(&source.input(), &config, &out)?;
            let s = &art.summary;
            println!(
                "{}: {} iterations, objective {:.6e}, nnz {}, residual {:.3e}",
                s.termination,
                s.iterations,
                s.final_objective,
                s.final_nnz,
                s.stationarity_residual
            );
            if let Some(d) = &s.diagnostic {
                eprintln!("warning: {d}");
            }
            Ok(art.status.exit_code())
        }
        Command::Sweep {
            source,
            config,
            lambda4,
            out,
        } => {
            let grid = parse_grid(&lambda4)?;
            let report = commands::cmd_sweep(&source.input(), &config, &grid, &out)?;
            print!("{}", commands::format_sweep(&report.rows));
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            Ok(exit::TOLERANCE)
        }
        Command::CheckBound {
            sigma_hat,
            sigma,
            weights,
        } => {
            let report = commands::cmd_check_bound(&sigma_hat, &sigma, &weights)?;
            println!("{report}");
            Ok(if report.passed() {
                exit::TOLERANCE
            } else {
                exit::ERROR
            })
        }
        Command::Generate {
            assets,
            periods,
            seed,
            out,
        } => {
            let r = SkewedReturns::new(assets, periods).seed(seed).generate()?;
            write_returns(&out, &r)?;
            println!("wrote {periods} x {assets} returns to {}", out.display());
            Ok(exit::TOLERANCE)
        }
    }
}
