use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

const EIGEN_MAX_SWEEPS: usize = 10_000;

/// `(A + Aᵀ) / 2`.
pub fn symmetrize(a: &DMatrix<f64>) -> DMatrix<f64> {
    (a + a.transpose()) * 0.5
}

#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: DVector<f64>,
    pub vectors: DMatrix<f64>,
}

impl Eigen {
    pub fn min(&self) -> f64 {
        self.values.min()
    }

    pub fn max(&self) -> f64 {
        self.values.max()
    }

    /// Spectral norm of the decomposed matrix.
    pub fn max_abs(&self) -> f64 {
        self.values.amax()
    }

    /// Rebuilds `V diag(values) Vᵀ` with every eigenvalue raised to at least `floor`.
    pub fn clipped(&self, floor: f64) -> (DMatrix<f64>, DVector<f64>) {
        let values = self.values.map(|v| v.max(floor));
        let scaled = &self.vectors * DMatrix::from_diagonal(&values);
        let rebuilt = symmetrize(&(scaled * self.vectors.transpose()));
        (rebuilt, values)
    }
}

pub fn symmetric_eigen(a: &DMatrix<f64>) -> Result<Eigen> {
    if !a.is_square() {
        return Err(Error::dim(format!(
            "eigendecomposition of non-square {}x{} matrix",
            a.nrows(),
            a.ncols()
        )));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite(
            "matrix passed to eigendecomposition".into(),
        ));
    }
    let eig = SymmetricEigen::try_new(a.clone(), f64::EPSILON, EIGEN_MAX_SWEEPS)
        .ok_or(Error::EigenFailure)?;
    Ok(Eigen {
        values: eig.eigenvalues,
        vectors: eig.eigenvectors,
    })
}

pub fn l1_norm(v: &DVector<f64>) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

pub fn inf_norm(v: &DVector<f64>) -> f64 {
    v.amax()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clipping_raises_negative_eigenvalues() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        let eig = symmetric_eigen(&a).unwrap();
        assert!((eig.min() + 1.0).abs() < 1e-12);
        let (clipped, values) = eig.clipped(0.0);
        assert!(values.min() >= 0.0);
        let check = symmetric_eigen(&clipped).unwrap();
        assert!(check.min() > -1e-12);
        assert!((check.max() - 3.0).abs() < 1e-12);
    }
}
