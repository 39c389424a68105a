//! Exact step along a segment: the objective restricted to a line is a cubic,
//! minimized in closed form and compared with a fine grid.

use nalgebra::DVector;
use sparse_mvs::linalg::l1_norm;
use sparse_mvs::sca_driver::line_search_cubic;
use sparse_mvs::{estimate_moments, ObjectiveParams, SkewedReturns};

fn main() -> sparse_mvs::Result<()> {
    let moments = estimate_moments(&SkewedReturns::new(4, 300).seed(5).generate()?);
    let params = ObjectiveParams::new([1.0, 4.0, 0.5, 0.1], moments)?;
    let w = DVector::from_vec(vec![0.0, 0.01, 0.0, -0.01]);
    let target = DVector::from_vec(vec![0.02, 0.03, 0.06, 0.01]);
    let d = &target - &w;
    let y = params.lambda4 * l1_norm(&w);
    let y_delta = params.lambda4 * l1_norm(&target) - y;

    let cubic = line_search_cubic(&params, &w, &d, y, y_delta)?;
    let gamma = cubic.argmin_unit();
    println!(
        "φ(γ) = {:.6} + {:.6}γ + {:.6}γ² + {:.6}γ³",
        cubic.c0, cubic.c1, cubic.c2, cubic.c3
    );
    println!("exact γ = {gamma:.8}, φ = {:.10}", cubic.eval(gamma));

    let (g_best, v_best) = (0..=10_000)
        .map(|i| i as f64 * 1e-4)
        .map(|g| {
            (
                g,
                params.evaluate(&(&w + &d * g)).unwrap().smooth + y + g * y_delta,
            )
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    println!("grid  γ = {g_best:.4}, φ = {v_best:.10}");
    Ok(())
}
