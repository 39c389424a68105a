//! Solve one sparse mean-variance-skewness problem and print the trace.

use sparse_mvs::{
    estimate_moments, run, stationarity_residual, ObjectiveParams, SkewedReturns, SolverConfig,
};

fn main() -> sparse_mvs::Result<()> {
    let returns = SkewedReturns::new(10, 500).seed(0).generate()?;
    let moments = estimate_moments(&returns);
    let config = SolverConfig::new([1.0, 4.0, 1.0, 0.05]);

    let outcome = run(&config, &moments)?;
    println!(
        "{:>3} {:>14} {:>12} {:>8} {:>4}",
        "t", "objective", "grad_l2", "gamma", "nnz"
    );
    for r in &outcome.trace.records {
        println!(
            "{:>3} {:>14.6e} {:>12.4e} {:>8.4} {:>4}",
            r.t, r.objective_total, r.smooth_grad_norm, r.gamma, r.nnz
        );
    }

    let params = ObjectiveParams::new(config.lambdas, moments)?;
    let parts = params.evaluate(&outcome.w)?;
    println!("terminated by {}", outcome.trace.terminated_by.as_str());
    println!(
        "mean {:.4e}  variance {:.4e}  skewness {:.4e}  l1 {:.4e}",
        parts.mean_term, parts.variance_term, parts.skewness_term, parts.l1_term
    );
    println!(
        "stationarity residual {:.2e}",
        stationarity_residual(&params, &outcome.w)?
    );
    for (name, w) in returns.labels().iter().zip(outcome.w.iter()) {
        println!("  {name:<8} {w:+.6}");
    }
    Ok(())
}
