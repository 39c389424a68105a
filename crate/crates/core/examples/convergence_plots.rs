//! Run the full `solve` command: writes weights, trace, both convergence plots
//! and a summary into a directory (default `target/convergence_plots`).

use std::path::PathBuf;

use sparse_mvs::io::commands::{cmd_solve, Input};
use sparse_mvs::io::returns_csv::write_returns;
use sparse_mvs::SkewedReturns;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("target/convergence_plots"));
    std::fs::create_dir_all(&out)?;

    let csv = out.join("returns.csv");
    write_returns(&csv, &SkewedReturns::new(10, 500).seed(0).generate()?)?;
    let cfg = out.join("solver.cfg");
    std::fs::write(
        &cfg,
        "lambda1 = 1\nlambda2 = 4\nlambda3 = 1\nlambda4 = 0.05\n",
    )?;

    let art = cmd_solve(&Input::Returns(csv), &cfg, &out.join("run"))?;
    println!(
        "{} after {} iterations; artifacts in {}",
        art.summary.termination,
        art.summary.iterations,
        art.dir.display()
    );
    Ok(())
}
