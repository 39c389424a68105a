//! Estimate mean, covariance and coskewness from a synthetic returns panel and
//! evaluate the skewness contractions at the equal-weight portfolio.

use nalgebra::DVector;
use sparse_mvs::{estimate_moments, SkewedReturns};

fn main() -> sparse_mvs::Result<()> {
    let returns = SkewedReturns::new(4, 500).seed(3).generate()?;
    let m = estimate_moments(&returns);
    println!("assets: {:?}", returns.labels());
    println!("mu    = {}", row(m.mu().iter()));
    for (i, r) in m.sigma().row_iter().enumerate() {
        println!(
            "{} {}",
            if i == 0 { "sigma =" } else { "       " },
            row(r.iter())
        );
    }

    let w = DVector::from_element(m.n(), 0.25);
    let phi = m.phi();
    println!("portfolio skewness wᵀΦ(w⊗w) = {:.6}", phi.value(&w)?);
    println!("gradient = {}", row(phi.gradient(&w)?.iter()));
    println!(
        "Φ_012 = {:.6}, Φ_201 = {:.6}",
        phi.get(0, 1, 2),
        phi.get(2, 0, 1)
    );
    Ok(())
}

fn row<'a>(vals: impl Iterator<Item = &'a f64>) -> String {
    vals.map(|v| format!("{v:9.4}"))
        .collect::<Vec<_>>()
        .join(" ")
}
