//! Trace how the number of held assets falls as the l1 weight grows.

use rayon::prelude::*;
use sparse_mvs::linalg::inf_norm;
use sparse_mvs::sca_driver::count_nonzero;
use sparse_mvs::{estimate_moments, run, ObjectiveParams, SkewedReturns, SolverConfig};

fn main() -> sparse_mvs::Result<()> {
    let moments = estimate_moments(&SkewedReturns::new(10, 500).seed(4).generate()?);
    let base = [1.0, 4.0, 1.0, 0.0];
    let params = ObjectiveParams::new(base, moments.clone())?;
    let g0 = inf_norm(&params.smooth_gradient(&nalgebra::DVector::zeros(10))?);
    println!("‖∇f(0)‖∞ = {g0:.4}; larger l1 weights give the empty portfolio");

    let grid = [0.0, 0.01, 0.03, 0.1, 0.3, 1.0, 10.0 * g0];
    let rows: Vec<_> = grid
        .par_iter()
        .map(|&l4| {
            let config = SolverConfig::new([base[0], base[1], base[2], l4]);
            (l4, run(&config, &moments))
        })
        .collect();
    println!("{:>10} {:>4} {:>14}", "lambda4", "nnz", "objective");
    for (l4, out) in rows {
        let out = out?;
        println!(
            "{l4:>10.4} {:>4} {:>14.6e}",
            count_nonzero(&out.w),
            out.trace.last().objective_total
        );
    }
    Ok(())
}
