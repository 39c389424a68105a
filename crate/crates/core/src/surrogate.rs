//! Convex quadratic models of the smooth objective.
//!
//! Around an anchor `wᵗ` the mean and variance terms are kept exactly and
//! the skewness term `−λ3 φ₃` is replaced by its second-order Taylor
//! expansion. The resulting quadratic coefficient `2λ2Σ + H` is generally
//! indefinite, so its eigenvalues are clipped from below at a floor. Clipping
//! touches only the curvature, so value and slope at the anchor are unchanged.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{self, symmetric_eigen};
use crate::objective::{quad_form, ObjectiveParams};

/// `m(w) = c + bᵀw + ½ wᵀAw` with `A` symmetric positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticModel {
    a: DMatrix<f64>,
    b: DVector<f64>,
    c: f64,
    anchor: DVector<f64>,
    lipschitz: Option<f64>,
    clipped: usize,
}

impl QuadraticModel {
    /// A model with no curvature information attached; the inner solver will
    /// fall back to backtracking for it. `a` is symmetrized.
    pub fn new(a: DMatrix<f64>, b: DVector<f64>, c: f64) -> Result<Self> {
        let n = b.len();
        if a.shape() != (n, n) {
            return Err(Error::dim(format!(
                "quadratic coefficient is {:?}, linear term has length {n}",
                a.shape()
            )));
        }
        let a = if a == a.transpose() {
            a
        } else {
            linalg::symmetrize(&a)
        };
        Ok(Self {
            a,
            b,
            c,
            anchor: DVector::zeros(n),
            lipschitz: None,
            clipped: 0,
        })
    }

    /// Attaches the largest eigenvalue of `A` as the gradient Lipschitz constant.
    pub fn with_eigen(mut self) -> Result<Self> {
        let eig = symmetric_eigen(&self.a)?;
        self.lipschitz = Some(eig.max().max(0.0));
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.b.len()
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn anchor(&self) -> &DVector<f64> {
        &self.anchor
    }

    /// Largest eigenvalue of `A`, when known.
    pub fn lipschitz(&self) -> Option<f64> {
        self.lipschitz
    }

    /// Number of eigenvalues raised to the floor while building the model.
    pub fn clipped_eigenvalues(&self) -> usize {
        self.clipped
    }

    fn check(&self, w: &DVector<f64>) -> Result<()> {
        if w.len() != self.n() {
            return Err(Error::dim(format!(
                "point has length {}, model is over {} assets",
                w.len(),
                self.n()
            )));
        }
        Ok(())
    }

    pub fn value(&self, w: &DVector<f64>) -> Result<f64> {
        self.check(w)?;
        Ok(self.c + self.b.dot(w) + 0.5 * quad_form(&self.a, w))
    }

    pub fn gradient(&self, w: &DVector<f64>) -> Result<DVector<f64>> {
        self.check(w)?;
        Ok(&self.a * w + &self.b)
    }
}

/// `c + bᵀw + ½ wᵀAw`.
pub fn model_value(model: &QuadraticModel, w: &DVector<f64>) -> Result<f64> {
    model.value(w)
}

/// Builds the convexified model of `f` anchored at `w_t`.
///
/// With `H = −6λ3 Φ(I ⊗ wᵗ)`, `g = −3λ3 Φ(wᵗ ⊗ wᵗ)` and `D = A − A_raw` the
/// clipping correction, the model is
///
/// ```text
/// −λ1 wᵀμ + λ2 wᵀΣw + f_ncvx(wᵗ) + gᵀ(w − wᵗ) + ½ (w − wᵗ)ᵀ(H + D)(w − wᵗ)
/// ```
///
/// expanded into canonical `(c, b, A)` form. When no eigenvalue falls below
/// the floor, `D = 0` and `A = A_raw` exactly.
pub fn build_surrogate(
    params: &ObjectiveParams,
    w_t: &DVector<f64>,
    epsilon_floor: f64,
) -> Result<QuadraticModel> {
    params.check(w_t)?;
    if !(epsilon_floor >= 0.0 && epsilon_floor.is_finite()) {
        return Err(Error::Invalid(format!(
            "epsilon_floor must be finite and >= 0, got {epsilon_floor}"
        )));
    }
    let moments = params.moments();
    let phi = moments.phi();
    let n = params.n();
    let lambda3 = params.lambda3;

    let (f_nc, g_nc, h_nc) = if lambda3 == 0.0 {
        (0.0, DVector::zeros(n), DMatrix::zeros(n, n))
    } else {
        (
            -lambda3 * phi.value(w_t)?,
            phi.gradient(w_t)? * -lambda3,
            phi.hessian(w_t)? * -lambda3,
        )
    };

    let a_raw = moments.sigma() * (2.0 * params.lambda2) + &h_nc;
    let eig = symmetric_eigen(&a_raw)?;
    let clipped = eig.values.iter().filter(|&&v| v < epsilon_floor).count();
    let (a, lipschitz) = if clipped == 0 {
        (a_raw.clone(), eig.max())
    } else {
        let (rebuilt, values) = eig.clipped(epsilon_floor);
        (rebuilt, values.max())
    };

    // curvature of the anchored Taylor part after clipping
    let h_eff = &h_nc + (&a - &a_raw);
    let h_anchor = &h_eff * w_t;
    let b = moments.mu() * -params.lambda1 + &g_nc - &h_anchor;
    let c = f_nc - g_nc.dot(w_t) + 0.5 * w_t.dot(&h_anchor);

    Ok(QuadraticModel {
        a,
        b,
        c,
        anchor: w_t.clone(),
        lipschitz: Some(lipschitz.max(0.0)),
        clipped,
    })
}
