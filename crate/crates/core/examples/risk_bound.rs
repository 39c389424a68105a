//! Risk misestimation from a noisy covariance never exceeds the max-entry
//! error times the squared l1 norm of the weights.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sparse_mvs::risk_error_bound;

fn main() -> sparse_mvs::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let n = 6;
    let f = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    let sigma = &f * f.transpose();
    let noise = DMatrix::from_fn(n, n, |_, _| rng.random_range(-0.05..0.05));
    let sigma_hat = &sigma + (&noise + noise.transpose()) * 0.5;

    for sparsity in [n, 3, 1] {
        let w = DVector::from_fn(n, |i, _| {
            if i < sparsity {
                1.0 / sparsity as f64
            } else {
                0.0
            }
        });
        let r = risk_error_bound(&sigma_hat, &sigma, &w)?;
        println!(
            "{sparsity} assets held: actual {:.3e} <= bound {:.3e}: {}",
            r.actual,
            r.bound,
            r.holds()
        );
    }
    Ok(())
}
