//! Sample moments of a returns panel and contractions of the coskewness tensor.
//!
//! The coskewness tensor is stored flattened as an `n × n²` matrix where entry
//! `(i, j * n + k)` holds `Φ_ijk`, so that `Φ (w ⊗ w)` is an ordinary
//! matrix-vector product. Every contraction below walks `(i, j, k)` directly
//! instead of forming Kronecker products.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg;

/// A `T × N` panel of simple returns, one row per period and one column per asset.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnsMatrix {
    data: DMatrix<f64>,
    asset_names: Option<Vec<String>>,
}

impl ReturnsMatrix {
    pub fn new(data: DMatrix<f64>, asset_names: Option<Vec<String>>) -> Result<Self> {
        let (t, n) = data.shape();
        if t < 2 {
            return Err(Error::dim(format!("need at least 2 observations, got {t}")));
        }
        if n < 1 {
            return Err(Error::dim("need at least one asset"));
        }
        if let Some((idx, _)) = data.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            // column-major storage
            let (row, col) = (idx % t, idx / t);
            return Err(Error::NonFinite(format!(
                "returns entry at row {row}, column {col}"
            )));
        }
        if let Some(names) = &asset_names {
            if names.len() != n {
                return Err(Error::dim(format!(
                    "{} asset names for {n} columns",
                    names.len()
                )));
            }
        }
        Ok(Self { data, asset_names })
    }

    /// Builds a panel from row-major observations.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let t = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != n) {
            return Err(Error::dim(format!(
                "row {bad} has {} entries, expected {n}",
                rows[bad].len()
            )));
        }
        Self::new(DMatrix::from_fn(t, n, |i, j| rows[i][j]), None)
    }

    pub fn data(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn n_periods(&self) -> usize {
        self.data.nrows()
    }

    pub fn n_assets(&self) -> usize {
        self.data.ncols()
    }

    pub fn asset_names(&self) -> Option<&[String]> {
        self.asset_names.as_deref()
    }

    /// Asset labels, falling back to `asset_<i>` when none were supplied.
    pub fn labels(&self) -> Vec<String> {
        match &self.asset_names {
            Some(names) => names.clone(),
            None => default_labels(self.n_assets()),
        }
    }
}

pub fn default_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("asset_{i}")).collect()
}

/// The flattened third central moment tensor, `n × n²`.
#[derive(Debug, Clone, PartialEq)]
pub struct Coskewness {
    n: usize,
    matrix: DMatrix<f64>,
}

impl Coskewness {
    /// Wraps an `n × n²` matrix as is. Supersymmetry is not enforced; see
    /// [`Coskewness::symmetrized`].
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        let n = matrix.nrows();
        if n == 0 || matrix.ncols() != n * n {
            return Err(Error::dim(format!(
                "coskewness matrix must be n x n^2, got {} x {}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("coskewness entry".into()));
        }
        Ok(Self { n, matrix })
    }

    /// Wraps `matrix` after averaging every entry over the permutations of
    /// its index triple. Triples whose permuted entries already agree are left
    /// untouched, so an exactly supersymmetric input comes back bit-identical.
    pub fn symmetrized(matrix: DMatrix<f64>) -> Result<Self> {
        let mut out = Self::new(matrix)?;
        let n = out.n;
        for i in 0..n {
            for j in i..n {
                for k in j..n {
                    let perms = permutations(i, j, k);
                    let first = out.get(i, j, k);
                    if perms.iter().all(|&(a, b, c)| out.get(a, b, c) == first) {
                        continue;
                    }
                    let mean = perms.iter().map(|&(a, b, c)| out.get(a, b, c)).sum::<f64>() / 6.0;
                    for &(a, b, c) in &perms {
                        out.matrix[(a, b * n + c)] = mean;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.matrix[(i, j * self.n + k)]
    }

    /// Largest absolute deviation of any entry from its permuted counterparts.
    pub fn asymmetry(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                for k in j..n {
                    let base = self.get(i, j, k);
                    for (a, b, c) in permutations(i, j, k) {
                        worst = worst.max((self.get(a, b, c) - base).abs());
                    }
                }
            }
        }
        worst
    }

    fn check(&self, v: &DVector<f64>, what: &str) -> Result<()> {
        if v.len() != self.n {
            return Err(Error::dim(format!(
                "{what} has length {}, coskewness is for {} assets",
                v.len(),
                self.n
            )));
        }
        Ok(())
    }

    /// Portfolio skewness `wᵀ Φ (w ⊗ w)`.
    pub fn value(&self, w: &DVector<f64>) -> Result<f64> {
        self.trilinear(w, w, w)
    }

    /// `∇ φ₃(w) = 3 Φ (w ⊗ w)`. Assumes supersymmetry.
    pub fn gradient(&self, w: &DVector<f64>) -> Result<DVector<f64>> {
        self.check(w, "w")?;
        let n = self.n;
        let mut g = DVector::zeros(n);
        for j in 0..n {
            for k in 0..n {
                let coef = w[j] * w[k];
                if coef == 0.0 {
                    continue;
                }
                let col = self.matrix.column(j * n + k);
                for i in 0..n {
                    g[i] += col[i] * coef;
                }
            }
        }
        g *= 3.0;
        Ok(g)
    }

    /// `∇² φ₃(w) = 6 Φ (I ⊗ w)`, symmetrized. Assumes supersymmetry.
    pub fn hessian(&self, w: &DVector<f64>) -> Result<DMatrix<f64>> {
        self.check(w, "w")?;
        let n = self.n;
        let mut h = DMatrix::zeros(n, n);
        for j in 0..n {
            for k in 0..n {
                if w[k] == 0.0 {
                    continue;
                }
                let col = self.matrix.column(j * n + k);
                for i in 0..n {
                    h[(i, j)] += col[i] * w[k];
                }
            }
        }
        h *= 6.0;
        Ok(linalg::symmetrize(&h))
    }

    /// `aᵀ Φ (b ⊗ c) = Σ_ijk Φ_ijk a_i b_j c_k`.
    pub fn trilinear(&self, a: &DVector<f64>, b: &DVector<f64>, c: &DVector<f64>) -> Result<f64> {
        self.check(a, "a")?;
        self.check(b, "b")?;
        self.check(c, "c")?;
        let n = self.n;
        let mut total = 0.0;
        for j in 0..n {
            for k in 0..n {
                let coef = b[j] * c[k];
                if coef == 0.0 {
                    continue;
                }
                total += coef * self.matrix.column(j * n + k).dot(a);
            }
        }
        Ok(total)
    }
}

fn permutations(i: usize, j: usize, k: usize) -> [(usize, usize, usize); 6] {
    [
        (i, j, k),
        (i, k, j),
        (j, i, k),
        (j, k, i),
        (k, i, j),
        (k, j, i),
    ]
}

/// Mean vector, covariance and coskewness of a returns panel.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSet {
    mu: DVector<f64>,
    sigma: DMatrix<f64>,
    phi: Coskewness,
}

impl MomentSet {
    /// Assembles user-supplied moments. Σ is replaced by `(Σ + Σᵀ)/2` and Φ by
    /// its permutation average whenever they are not already exactly symmetric;
    /// Σ must be positive semidefinite up to `1e-10 · ‖Σ‖₂`.
    pub fn new(mu: DVector<f64>, sigma: DMatrix<f64>, phi: DMatrix<f64>) -> Result<Self> {
        let n = mu.len();
        if n == 0 {
            return Err(Error::dim("empty mean vector"));
        }
        if sigma.shape() != (n, n) {
            return Err(Error::dim(format!(
                "sigma is {}x{}, expected {n}x{n}",
                sigma.nrows(),
                sigma.ncols()
            )));
        }
        if phi.nrows() != n {
            return Err(Error::dim(format!(
                "phi has {} rows, expected {n}",
                phi.nrows()
            )));
        }
        if mu.iter().chain(sigma.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("mean or covariance entry".into()));
        }
        let sigma = if sigma == sigma.transpose() {
            sigma
        } else {
            linalg::symmetrize(&sigma)
        };
        let eig = linalg::symmetric_eigen(&sigma)?;
        let norm = eig.max_abs();
        if eig.min() < -1e-10 * norm {
            return Err(Error::Invalid(format!(
                "covariance is not positive semidefinite (min eigenvalue {:e})",
                eig.min()
            )));
        }
        let phi = Coskewness::symmetrized(phi)?;
        Ok(Self { mu, sigma, phi })
    }

    pub fn n(&self) -> usize {
        self.mu.len()
    }

    pub fn mu(&self) -> &DVector<f64> {
        &self.mu
    }

    pub fn sigma(&self) -> &DMatrix<f64> {
        &self.sigma
    }

    pub fn phi(&self) -> &Coskewness {
        &self.phi
    }
}

/// Population (1/T) estimates of μ, Σ and Φ.
///
/// Σ and Φ are accumulated only over sorted index tuples and mirrored, so the
/// results are exactly symmetric and supersymmetric.
pub fn estimate_moments(returns: &ReturnsMatrix) -> MomentSet {
    let r = returns.data();
    let (t, n) = r.shape();
    let tf = t as f64;

    let mu = DVector::from_fn(n, |i, _| r.column(i).sum() / tf);
    let centered = DMatrix::from_fn(t, n, |s, i| r[(s, i)] - mu[i]);

    let mut sigma = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let mut acc = 0.0;
            for s in 0..t {
                acc += centered[(s, i)] * centered[(s, j)];
            }
            sigma[(i, j)] = acc / tf;
            sigma[(j, i)] = acc / tf;
        }
    }

    let mut phi = DMatrix::zeros(n, n * n);
    for i in 0..n {
        for j in i..n {
            for k in j..n {
                let mut acc = 0.0;
                for s in 0..t {
                    acc += centered[(s, i)] * centered[(s, j)] * centered[(s, k)];
                }
                let v = acc / tf;
                for (a, b, c) in permutations(i, j, k) {
                    phi[(a, b * n + c)] = v;
                }
            }
        }
    }

    MomentSet {
        mu,
        sigma,
        phi: Coskewness { n, matrix: phi },
    }
}

/// `wᵀ Φ (w ⊗ w)`.
pub fn skewness_value(phi: &Coskewness, w: &DVector<f64>) -> Result<f64> {
    phi.value(w)
}

/// `3 Φ (w ⊗ w)`.
pub fn skewness_gradient(phi: &Coskewness, w: &DVector<f64>) -> Result<DVector<f64>> {
    phi.gradient(w)
}

/// `6 Φ (I ⊗ w)`, symmetrized.
pub fn skewness_hessian(phi: &Coskewness, w: &DVector<f64>) -> Result<DMatrix<f64>> {
    phi.hessian(w)
}

/// `aᵀ Φ (b ⊗ c)`.
pub fn trilinear(
    phi: &Coskewness,
    a: &DVector<f64>,
    b: &DVector<f64>,
    c: &DVector<f64>,
) -> Result<f64> {
    phi.trilinear(a, b, c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic::SkewedReturns;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn oracle_phi(r: &DMatrix<f64>) -> Vec<f64> {
        let (t, n) = r.shape();
        let mean: Vec<f64> = (0..n)
            .map(|i| (0..t).map(|s| r[(s, i)]).sum::<f64>() / t as f64)
            .collect();
        let mut out = vec![0.0; n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut acc = 0.0;
                    for s in 0..t {
                        acc +=
                            (r[(s, i)] - mean[i]) * (r[(s, j)] - mean[j]) * (r[(s, k)] - mean[k]);
                    }
                    out[(i * n + j) * n + k] = acc / t as f64;
                }
            }
        }
        out
    }

    fn brute_triple(phi: &Coskewness, a: &DVector<f64>, b: &DVector<f64>, c: &DVector<f64>) -> f64 {
        let n = phi.n();
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    s += phi.get(i, j, k) * a[i] * b[j] * c[k];
                }
            }
        }
        s
    }

    fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
        DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0))
    }

    fn data_phi(n: usize, seed: u64) -> Coskewness {
        let r = SkewedReturns::new(n, 60).seed(seed).generate().unwrap();
        estimate_moments(&r).phi().clone()
    }

    #[test]
    fn two_point_sample() {
        let r = ReturnsMatrix::from_rows(&[vec![0.1], vec![-0.1]]).unwrap();
        let m = estimate_moments(&r);
        assert_eq!(m.mu()[0], 0.0);
        assert!((m.sigma()[(0, 0)] - 0.01).abs() < 1e-15);
        assert_eq!(m.phi().get(0, 0, 0), 0.0);
    }

    #[test]
    fn column_means() {
        let r = ReturnsMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let m = estimate_moments(&r);
        assert_eq!(m.mu().as_slice(), &[2.0, 3.0]);
    }

    #[test]
    fn rejects_short_or_non_finite_panels() {
        assert!(matches!(
            ReturnsMatrix::from_rows(&[vec![1.0, 2.0]]),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            ReturnsMatrix::from_rows(&[vec![1.0], vec![f64::NAN]]),
            Err(Error::NonFinite(_))
        ));
        assert!(matches!(
            ReturnsMatrix::from_rows(&[vec![1.0, 2.0], vec![1.0]]),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn phi_matches_triple_loop_on_500_by_3() {
        let r = SkewedReturns::new(3, 500).seed(11).generate().unwrap();
        let m = estimate_moments(&r);
        let oracle = oracle_phi(r.data());
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let diff = (m.phi().get(i, j, k) - oracle[(i * 3 + j) * 3 + k]).abs();
                    assert!(diff <= 1e-14, "({i},{j},{k}) off by {diff:e}");
                }
            }
        }
        assert_eq!(m.phi().asymmetry(), 0.0);
    }

    #[test]
    fn scalar_contractions() {
        let m3 = 0.7;
        let phi = Coskewness::new(DMatrix::from_element(1, 1, m3)).unwrap();
        let w = DVector::from_element(1, 2.0);
        assert_eq!(phi.value(&w).unwrap(), 8.0 * m3);
        assert_eq!(phi.gradient(&w).unwrap()[0], 12.0 * m3);
        assert_eq!(phi.hessian(&w).unwrap()[(0, 0)], 12.0 * m3);
    }

    #[test]
    fn zero_weights_give_zero_contractions() {
        let phi = data_phi(4, 3);
        let z = DVector::zeros(4);
        assert_eq!(phi.value(&z).unwrap(), 0.0);
        assert_eq!(phi.gradient(&z).unwrap(), DVector::zeros(4));
        assert_eq!(phi.hessian(&z).unwrap(), DMatrix::zeros(4, 4));
    }

    #[test]
    fn value_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let phi = data_phi(4, 8);
        for _ in 0..20 {
            let w = random_vec(&mut rng, 4);
            let got = phi.value(&w).unwrap();
            let want = brute_triple(&phi, &w, &w, &w);
            assert!(
                (got - want).abs() <= 1e-13 * want.abs().max(1e-300),
                "{got} vs {want}"
            );
        }
    }

    #[test]
    fn gradient_matches_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let phi = data_phi(5, 9);
        let h = 1e-5;
        for _ in 0..10 {
            let w = random_vec(&mut rng, 5);
            let g = phi.gradient(&w).unwrap();
            let fd = DVector::from_fn(5, |i, _| {
                let mut p = w.clone();
                let mut m = w.clone();
                p[i] += h;
                m[i] -= h;
                (phi.value(&p).unwrap() - phi.value(&m).unwrap()) / (2.0 * h)
            });
            let rel = (&g - &fd).norm() / g.norm();
            assert!(rel <= 1e-6, "relative error {rel:e}");
        }
    }

    #[test]
    fn hessian_matches_differences_of_gradient() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let phi = data_phi(4, 10);
        let h = 1e-5;
        for _ in 0..10 {
            let w = random_vec(&mut rng, 4);
            let hess = phi.hessian(&w).unwrap();
            let mut fd = DMatrix::zeros(4, 4);
            for j in 0..4 {
                let mut p = w.clone();
                let mut m = w.clone();
                p[j] += h;
                m[j] -= h;
                let col = (phi.gradient(&p).unwrap() - phi.gradient(&m).unwrap()) / (2.0 * h);
                fd.set_column(j, &col);
            }
            let rel = (&hess - &fd).norm() / hess.norm();
            assert!(rel <= 1e-5, "relative error {rel:e}");
        }
    }

    #[test]
    fn trilinear_basis_extraction_and_permutations() {
        let phi = data_phi(3, 12);
        let e = |i: usize| DVector::from_fn(3, |r, _| if r == i { 1.0 } else { 0.0 });
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    assert_eq!(
                        phi.trilinear(&e(i), &e(j), &e(k)).unwrap(),
                        phi.get(i, j, k)
                    );
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let (a, b, c) = (
            random_vec(&mut rng, 3),
            random_vec(&mut rng, 3),
            random_vec(&mut rng, 3),
        );
        let reference = brute_triple(&phi, &a, &b, &c);
        for (x, y, z) in [
            (&a, &b, &c),
            (&a, &c, &b),
            (&b, &a, &c),
            (&b, &c, &a),
            (&c, &a, &b),
            (&c, &b, &a),
        ] {
            let v = phi.trilinear(x, y, z).unwrap();
            assert!((v - reference).abs() <= 1e-13 * reference.abs().max(1.0));
        }
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let phi = data_phi(3, 1);
        let w = DVector::zeros(4);
        assert!(matches!(phi.value(&w), Err(Error::Dimension(_))));
        assert!(matches!(phi.gradient(&w), Err(Error::Dimension(_))));
        assert!(matches!(phi.hessian(&w), Err(Error::Dimension(_))));
        assert!(Coskewness::new(DMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn symmetrization_averages_permutations() {
        let mut m = DMatrix::zeros(2, 4);
        m[(0, 1)] = 6.0; // (0,0,1)
        let phi = Coskewness::symmetrized(m).unwrap();
        // (0,0,1), (0,1,0), (1,0,0) each receive 6·(2/6) = 2
        assert_eq!(phi.get(0, 0, 1), 2.0);
        assert_eq!(phi.get(0, 1, 0), 2.0);
        assert_eq!(phi.get(1, 0, 0), 2.0);
        assert_eq!(phi.asymmetry(), 0.0);
    }

    #[test]
    fn moment_set_rejects_indefinite_covariance() {
        let sigma = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        let err = MomentSet::new(DVector::zeros(2), sigma, DMatrix::zeros(2, 4));
        assert!(matches!(err, Err(Error::Invalid(_))));
    }
}
