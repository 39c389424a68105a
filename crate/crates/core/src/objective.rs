//! The sparse mean-variance-skewness objective
//!
//! ```text
//! F(w) = f(w) + g(w)
//! f(w) = −λ1 wᵀμ + λ2 wᵀΣw − λ3 wᵀΦ(w ⊗ w)
//! g(w) = λ4 ‖w‖₁
//! ```

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::l1_norm;
use crate::moments::MomentSet;

/// Penalty weights together with the moments they act on.
#[derive(Debug, Clone)]
pub struct ObjectiveParams {
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
    pub lambda4: f64,
    moments: MomentSet,
}

impl ObjectiveParams {
    pub fn new(lambdas: [f64; 4], moments: MomentSet) -> Result<Self> {
        let bad: Vec<String> = lambdas
            .iter()
            .enumerate()
            .filter(|(_, l)| !l.is_finite() || **l < 0.0)
            .map(|(i, l)| format!("lambda{} must be finite and >= 0, got {l}", i + 1))
            .collect();
        if !bad.is_empty() {
            return Err(Error::Config(bad));
        }
        let [lambda1, lambda2, lambda3, lambda4] = lambdas;
        Ok(Self {
            lambda1,
            lambda2,
            lambda3,
            lambda4,
            moments,
        })
    }

    pub fn moments(&self) -> &MomentSet {
        &self.moments
    }

    pub fn n(&self) -> usize {
        self.moments.n()
    }

    pub fn lambdas(&self) -> [f64; 4] {
        [self.lambda1, self.lambda2, self.lambda3, self.lambda4]
    }

    /// Same moments, different ℓ1 weight.
    pub fn with_lambda4(&self, lambda4: f64) -> Result<Self> {
        Self::new(
            [self.lambda1, self.lambda2, self.lambda3, lambda4],
            self.moments.clone(),
        )
    }

    pub(crate) fn check(&self, w: &DVector<f64>) -> Result<()> {
        if w.len() != self.n() {
            return Err(Error::dim(format!(
                "weight vector has length {}, expected {}",
                w.len(),
                self.n()
            )));
        }
        Ok(())
    }

    pub fn evaluate(&self, w: &DVector<f64>) -> Result<ObjectiveBreakdown> {
        self.check(w)?;
        let m = &self.moments;
        let mean_term = -self.lambda1 * w.dot(m.mu());
        let variance_term = self.lambda2 * quad_form(m.sigma(), w);
        let skewness_term = -self.lambda3 * m.phi().value(w)?;
        let l1_term = self.lambda4 * l1_norm(w);
        let smooth = mean_term + variance_term + skewness_term;
        Ok(ObjectiveBreakdown {
            mean_term,
            variance_term,
            skewness_term,
            l1_term,
            smooth,
            total: smooth + l1_term,
        })
    }

    /// The differentiable part `f(w)`.
    pub fn smooth_value(&self, w: &DVector<f64>) -> Result<f64> {
        Ok(self.evaluate(w)?.smooth)
    }

    /// `∇f(w) = −λ1 μ + 2 λ2 Σ w − 3 λ3 Φ(w ⊗ w)`.
    pub fn smooth_gradient(&self, w: &DVector<f64>) -> Result<DVector<f64>> {
        self.check(w)?;
        let m = &self.moments;
        let mut g = m.mu() * -self.lambda1;
        g += (m.sigma() * w) * (2.0 * self.lambda2);
        if self.lambda3 != 0.0 {
            g -= m.phi().gradient(w)? * self.lambda3;
        }
        Ok(g)
    }
}

/// The individual terms of the objective at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveBreakdown {
    pub mean_term: f64,
    pub variance_term: f64,
    pub skewness_term: f64,
    pub l1_term: f64,
    pub smooth: f64,
    pub total: f64,
}

pub(crate) fn quad_form(a: &DMatrix<f64>, w: &DVector<f64>) -> f64 {
    w.dot(&(a * w))
}

/// The risk-error bound and the realized error for one portfolio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskBound {
    /// `max_ij |Σ̂ − Σ|_ij · ‖w‖₁²`
    pub bound: f64,
    /// `|wᵀΣ̂w − wᵀΣw|`
    pub actual: f64,
}

impl RiskBound {
    pub fn holds(&self) -> bool {
        self.actual <= self.bound + 1e-12
    }
}

/// Compares the risk of `w` under an estimated and a reference covariance
/// against the entrywise-max-norm bound `‖Σ̂ − Σ‖_max ‖w‖₁²`.
pub fn risk_error_bound(
    sigma_hat: &DMatrix<f64>,
    sigma_true: &DMatrix<f64>,
    w: &DVector<f64>,
) -> Result<RiskBound> {
    let n = w.len();
    if sigma_hat.shape() != (n, n) || sigma_true.shape() != (n, n) {
        return Err(Error::dim(format!(
            "covariances are {:?} and {:?}, weights have length {n}",
            sigma_hat.shape(),
            sigma_true.shape()
        )));
    }
    let max_entry = (sigma_hat - sigma_true).amax();
    let l1 = l1_norm(w);
    Ok(RiskBound {
        bound: max_entry * l1 * l1,
        actual: (quad_form(sigma_hat, w) - quad_form(sigma_true, w)).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::estimate_moments;
    use crate::synthetic::SkewedReturns;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn scalar_params() -> ObjectiveParams {
        let m = MomentSet::new(
            DVector::from_element(1, 1.0),
            DMatrix::from_element(1, 1, 1.0),
            DMatrix::from_element(1, 1, 1.0),
        )
        .unwrap();
        ObjectiveParams::new([1.0, 1.0, 1.0, 1.0], m).unwrap()
    }

    fn data_params(n: usize, seed: u64, lambdas: [f64; 4]) -> ObjectiveParams {
        let r = SkewedReturns::new(n, 80).seed(seed).generate().unwrap();
        ObjectiveParams::new(lambdas, estimate_moments(&r)).unwrap()
    }

    #[test]
    fn scalar_breakdown() {
        let b = scalar_params()
            .evaluate(&DVector::from_element(1, 2.0))
            .unwrap();
        assert_eq!(b.mean_term, -2.0);
        assert_eq!(b.variance_term, 4.0);
        assert_eq!(b.skewness_term, -8.0);
        assert_eq!(b.l1_term, 2.0);
        assert_eq!(b.total, -4.0);
    }

    #[test]
    fn zero_weights() {
        let p = data_params(3, 1, [1.0, 2.0, 3.0, 4.0]);
        let b = p.evaluate(&DVector::zeros(3)).unwrap();
        assert_eq!(b.total, 0.0);
        assert_eq!(b.smooth, 0.0);
        let g = p.smooth_gradient(&DVector::zeros(3)).unwrap();
        assert_eq!(g, p.moments().mu() * -1.0);
    }

    #[test]
    fn total_matches_independent_evaluation() {
        let lambdas = [0.7, 1.3, 0.4, 0.2];
        let p = data_params(6, 2, lambdas);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let w = DVector::from_fn(6, |_, _| rng.random_range(-1.0..1.0));
            let m = p.moments();
            let mut var = 0.0;
            for i in 0..6 {
                for j in 0..6 {
                    var += w[i] * m.sigma()[(i, j)] * w[j];
                }
            }
            let want = -lambdas[0] * m.mu().dot(&w) + lambdas[1] * var
                - lambdas[2] * m.phi().trilinear(&w, &w, &w).unwrap()
                + lambdas[3] * w.iter().map(|x| x.abs()).sum::<f64>();
            let got = p.evaluate(&w).unwrap();
            assert!((got.total - want).abs() <= 1e-12 * want.abs().max(1.0));
            assert!(
                (got.total - (got.smooth + got.l1_term)).abs() <= 1e-12 * got.total.abs().max(1.0)
            );
        }
    }

    #[test]
    fn pure_quadratic_gradient() {
        let p = data_params(4, 4, [0.0, 1.5, 0.0, 0.3]);
        let w = DVector::from_vec(vec![0.1, -0.4, 0.3, 0.2]);
        let g = p.smooth_gradient(&w).unwrap();
        let want = p.moments().sigma() * &w * 3.0;
        assert!((g - want).amax() < 1e-14);
    }

    #[test]
    fn gradient_matches_central_differences() {
        let p = data_params(5, 5, [1.0, 2.0, 1.0, 0.1]);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let h = 1e-5;
        for _ in 0..10 {
            let w = DVector::from_fn(5, |_, _| rng.random_range(-1.0..1.0));
            let g = p.smooth_gradient(&w).unwrap();
            let fd = DVector::from_fn(5, |i, _| {
                let mut a = w.clone();
                let mut b = w.clone();
                a[i] += h;
                b[i] -= h;
                (p.smooth_value(&a).unwrap() - p.smooth_value(&b).unwrap()) / (2.0 * h)
            });
            assert!((&g - &fd).norm() / g.norm() <= 1e-6);
        }
    }

    #[test]
    fn l1_term_is_sign_invariant() {
        let p = data_params(4, 6, [1.0, 1.0, 1.0, 0.5]);
        let w = DVector::from_vec(vec![-0.3, 0.2, -0.1, 0.0]);
        let abs = w.map(f64::abs);
        assert_eq!(
            p.evaluate(&w).unwrap().l1_term,
            p.evaluate(&abs).unwrap().l1_term
        );
    }

    #[test]
    fn bound_examples() {
        let s = DMatrix::from_row_slice(2, 2, &[1.0, 0.2, 0.2, 2.0]);
        let w = DVector::from_vec(vec![0.4, -0.6]);
        assert_eq!(
            risk_error_bound(&s, &s, &w).unwrap(),
            RiskBound {
                bound: 0.0,
                actual: 0.0
            }
        );

        let r = risk_error_bound(
            &DMatrix::from_element(1, 1, 2.0),
            &DMatrix::from_element(1, 1, 1.0),
            &DVector::from_element(1, 3.0),
        )
        .unwrap();
        assert_eq!((r.bound, r.actual), (9.0, 9.0));
        assert!(r.holds());
    }

    #[test]
    fn bound_holds_on_random_perturbations() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..1000 {
            let base = DMatrix::from_fn(4, 4, |_, _| rng.random_range(-1.0..1.0));
            let sigma = &base * base.transpose();
            let noise = DMatrix::from_fn(4, 4, |_, _| rng.random_range(-0.1..0.1));
            let sigma_hat = &sigma + crate::linalg::symmetrize(&noise);
            let w = DVector::from_fn(4, |_, _| rng.random_range(-1.0..1.0));
            assert!(risk_error_bound(&sigma_hat, &sigma, &w).unwrap().holds());
        }
    }

    #[test]
    fn negative_lambda_rejected() {
        let m = scalar_params().moments().clone();
        match ObjectiveParams::new([1.0, -1.0, 0.0, f64::NAN], m) {
            Err(Error::Config(msgs)) => {
                assert_eq!(msgs.len(), 2);
                assert!(msgs[0].contains("lambda2"));
                assert!(msgs[1].contains("lambda4"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
