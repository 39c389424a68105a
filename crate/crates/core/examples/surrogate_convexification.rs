//! Build the convex quadratic model of the objective around a point where the
//! skewness curvature dominates, and show which eigenvalues were clipped.

use nalgebra::DVector;
use sparse_mvs::linalg::symmetric_eigen;
use sparse_mvs::{build_surrogate, estimate_moments, ObjectiveParams, SkewedReturns};

fn main() -> sparse_mvs::Result<()> {
    let moments = estimate_moments(&SkewedReturns::new(5, 400).seed(11).generate()?);
    let params = ObjectiveParams::new([1.0, 0.05, 4.0, 0.0], moments)?;
    let anchor = DVector::from_vec(vec![0.6, -0.4, 0.3, 0.5, -0.2]);

    let model = build_surrogate(&params, &anchor, 0.0)?;
    let eig = symmetric_eigen(model.a())?;
    println!("clipped eigenvalues: {}", model.clipped_eigenvalues());
    println!(
        "model curvature spectrum: {:?}",
        eig.values
            .iter()
            .map(|v| format!("{v:.3e}"))
            .collect::<Vec<_>>()
    );

    let f = params.smooth_value(&anchor)?;
    let m = model.value(&anchor)?;
    let gap = (params.smooth_gradient(&anchor)? - model.gradient(&anchor)?).amax();
    println!("f(anchor) = {f:.12}, model(anchor) = {m:.12}");
    println!("gradient mismatch at anchor: {gap:.2e}");

    for s in [-0.5, -0.1, 0.1, 0.5] {
        let w = &anchor * (1.0 + s);
        println!(
            "scale {:+.1}: f = {:+.6}  model = {:+.6}",
            s,
            params.smooth_value(&w)?,
            model.value(&w)?
        );
    }
    Ok(())
}
