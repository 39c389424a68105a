//! Independent reference computations shared by the integration tests.
//! Nothing here calls into the library's numerical kernels.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type NestedMoments = (Vec<f64>, Vec<Vec<f64>>, Vec<Vec<Vec<f64>>>);

/// Plain loops over the definition: population moments about the sample mean.
pub fn oracle_moments(r: &DMatrix<f64>) -> NestedMoments {
    let (t, n) = r.shape();
    let tf = t as f64;
    let mut mu = vec![0.0; n];
    for i in 0..n {
        for s in 0..t {
            mu[i] += r[(s, i)];
        }
        mu[i] /= tf;
    }
    let mut sigma = vec![vec![0.0; n]; n];
    let mut phi = vec![vec![vec![0.0; n]; n]; n];
    for i in 0..n {
        for j in 0..n {
            for s in 0..t {
                sigma[i][j] += (r[(s, i)] - mu[i]) * (r[(s, j)] - mu[j]);
            }
            sigma[i][j] /= tf;
            for k in 0..n {
                for s in 0..t {
                    phi[i][j][k] += (r[(s, i)] - mu[i]) * (r[(s, j)] - mu[j]) * (r[(s, k)] - mu[k]);
                }
                phi[i][j][k] /= tf;
            }
        }
    }
    (mu, sigma, phi)
}

/// A random tensor averaged over all six index permutations, laid out as
/// `n × n²` with entry `(i, j·n + k)`.
pub fn random_supersymmetric(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let raw: Vec<f64> = (0..n * n * n)
        .map(|_| rng.random_range(-1.0..1.0))
        .collect();
    let at = |i: usize, j: usize, k: usize| raw[(i * n + j) * n + k];
    DMatrix::from_fn(n, n * n, |i, col| {
        let (j, k) = (col / n, col % n);
        (at(i, j, k) + at(i, k, j) + at(j, i, k) + at(j, k, i) + at(k, i, j) + at(k, j, i)) / 6.0
    })
}

pub fn tensor_value(phi: &DMatrix<f64>, w: &DVector<f64>) -> f64 {
    let n = w.len();
    let mut v = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                v += phi[(i, j * n + k)] * w[i] * w[j] * w[k];
            }
        }
    }
    v
}

pub fn random_vector(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.random_range(-scale..scale))
}

pub fn random_psd(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let f = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    &f * f.transpose() + DMatrix::identity(n, n) * 0.1
}

pub fn soft_threshold(x: f64, tau: f64) -> f64 {
    if x > tau {
        x - tau
    } else if x < -tau {
        x + tau
    } else {
        0.0
    }
}

/// Largest eigenvalue of a PSD matrix by power iteration.
pub fn power_iteration(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut v = DVector::from_element(n, 1.0 / (n as f64).sqrt());
    let mut lambda = 0.0;
    for _ in 0..5000 {
        let av = a * &v;
        let norm = av.norm();
        if norm == 0.0 {
            return 0.0;
        }
        let next = av.dot(&v);
        v = av / norm;
        if (next - lambda).abs() <= 1e-15 * next.abs() {
            return next;
        }
        lambda = next;
    }
    lambda
}

/// Plain ISTA (no acceleration) on `wᵀPw + qᵀw + λ‖w‖₁`, run to a tight
/// fixed point.
pub fn ista(p: &DMatrix<f64>, q: &DVector<f64>, lambda: f64) -> DVector<f64> {
    let hess = p * 2.0;
    let l = power_iteration(&hess) * 1.01;
    let mut w = DVector::zeros(q.len());
    for _ in 0..2_000_000 {
        let g = &hess * &w + q;
        let next = (&w - g / l).map(|x| soft_threshold(x, lambda / l));
        let delta = (&next - &w).amax();
        w = next;
        if delta <= 1e-15 {
            break;
        }
    }
    w
}
