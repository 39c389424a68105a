//! Seeded generator of skewed return panels.
//!
//! Returns follow a one-factor model with gamma-distributed idiosyncratic
//! shocks, scaled like monthly returns quoted in percent:
//!
//! ```text
//! r[t, i] = m_i + β_i · M_t + s_i · σ_i · (G[t, i] − k_i) / √k_i
//! M_t ~ N(0, 3²),  G[t, i] ~ Gamma(k_i, 1),  σ_i = ±1
//! ```
//!
//! Per-asset parameters are drawn from the same seeded stream, so a
//! `(n_assets, n_periods, seed)` triple always yields the same panel.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Normal};

use crate::error::{Error, Result};
use crate::moments::{default_labels, ReturnsMatrix};

#[derive(Debug, Clone)]
pub struct SkewedReturns {
    n_assets: usize,
    n_periods: usize,
    seed: u64,
    market_vol: f64,
}

impl SkewedReturns {
    pub fn new(n_assets: usize, n_periods: usize) -> Self {
        Self {
            n_assets,
            n_periods,
            seed: 0,
            market_vol: 3.0,
        }
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn market_vol(mut self, vol: f64) -> Self {
        self.market_vol = vol;
        self
    }

    pub fn generate(&self) -> Result<ReturnsMatrix> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let n = self.n_assets;
        let market = Normal::new(0.0, self.market_vol)
            .map_err(|e| Error::Invalid(format!("market volatility: {e}")))?;

        struct Asset {
            mean: f64,
            beta: f64,
            vol: f64,
            sign: f64,
            shape: f64,
            shocks: Gamma<f64>,
        }
        let assets: Vec<Asset> = (0..n)
            .map(|_| {
                let shape = rng.random_range(1.0..4.0);
                Asset {
                    mean: rng.random_range(0.2..1.5),
                    beta: rng.random_range(0.5..1.5),
                    vol: rng.random_range(1.5..4.0),
                    sign: if rng.random_bool(0.5) { 1.0 } else { -1.0 },
                    shape,
                    shocks: Gamma::new(shape, 1.0).expect("positive gamma shape"),
                }
            })
            .collect();

        let mut data = DMatrix::zeros(self.n_periods, n);
        for t in 0..self.n_periods {
            let m = market.sample(&mut rng);
            for (i, a) in assets.iter().enumerate() {
                let g = a.shocks.sample(&mut rng);
                let shock = a.sign * a.vol * (g - a.shape) / a.shape.sqrt();
                data[(t, i)] = a.mean + a.beta * m + shock;
            }
        }
        ReturnsMatrix::new(data, Some(default_labels(n)))
    }
}
