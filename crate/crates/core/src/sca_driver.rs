//! Successive convex approximation for the sparse MVS problem.
//!
//! Each outer iteration builds a convex quadratic model of the smooth part at
//! the current weights, solves the ℓ1-penalized model for the best response
//! `Bwᵗ`, and moves toward it by an exactly line-searched step:
//!
//! ```text
//! wᵗ⁺¹ = wᵗ + γᵗ (Bwᵗ − wᵗ)
//! yᵗ⁺¹ = yᵗ + γᵗ (y*(wᵗ) − yᵗ)
//! ```
//!
//! `y` is the epigraph variable standing in for `λ4 ‖w‖₁`.

use std::time::Instant;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::inner_solver::{soft_threshold, solve_subproblem, InnerSettings, InnerSolution};
use crate::linalg::{inf_norm, l1_norm};
use crate::moments::MomentSet;
use crate::objective::{quad_form, ObjectiveParams};
use crate::surrogate::build_surrogate;

/// Weights with magnitude at or below this count as zero.
pub const NNZ_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Default)]
pub enum Init {
    /// Uniform on `[−1/N, 1/N]` from the configured seed.
    #[default]
    RandomUniform,
    Zeros,
    Given(DVector<f64>),
}

/// Bookkeeping for the epigraph variable after each step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EpigraphUpdate {
    /// Convex-combination update, then lowered to `λ4 ‖wᵗ⁺¹‖₁`.
    #[default]
    Tight,
    /// Convex-combination update only; `y` may carry slack above `λ4 ‖w‖₁`.
    Convex,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub lambdas: [f64; 4],
    pub inner: InnerSettings,
    pub max_outer_iters: usize,
    /// Stop once `‖Bwᵗ − wᵗ‖∞` falls to this value.
    pub outer_tol: f64,
    pub epsilon_floor: f64,
    pub seed: u64,
    pub init: Init,
    pub epigraph: EpigraphUpdate,
}

impl SolverConfig {
    pub fn new(lambdas: [f64; 4]) -> Self {
        Self {
            lambdas,
            inner: InnerSettings::default(),
            max_outer_iters: 200,
            outer_tol: 1e-8,
            epsilon_floor: 0.0,
            seed: 0,
            init: Init::RandomUniform,
            epigraph: EpigraphUpdate::Tight,
        }
    }

    /// Collects every invalid field rather than stopping at the first.
    pub fn validate(&self, n: usize) -> Result<()> {
        let mut bad = Vec::new();
        for (i, l) in self.lambdas.iter().enumerate() {
            if !(l.is_finite() && *l >= 0.0) {
                bad.push(format!("lambda{} must be finite and >= 0, got {l}", i + 1));
            }
        }
        if let Err(Error::Config(inner)) = self.inner.validate() {
            bad.extend(inner);
        }
        if self.max_outer_iters < 1 {
            bad.push("max_outer_iters must be >= 1".into());
        }
        if !(self.outer_tol > 0.0 && self.outer_tol.is_finite()) {
            bad.push(format!(
                "outer_tol must be finite and > 0, got {}",
                self.outer_tol
            ));
        }
        if !(self.epsilon_floor >= 0.0 && self.epsilon_floor.is_finite()) {
            bad.push(format!(
                "epsilon_floor must be finite and >= 0, got {}",
                self.epsilon_floor
            ));
        }
        if let Init::Given(w) = &self.init {
            if w.len() != n {
                bad.push(format!("init has {} weights, expected {n}", w.len()));
            } else if w.iter().any(|v| !v.is_finite()) {
                bad.push("init contains non-finite weights".into());
            }
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(bad))
        }
    }

    pub fn initial_weights(&self, n: usize) -> DVector<f64> {
        match &self.init {
            Init::Zeros => DVector::zeros(n),
            Init::Given(w) => w.clone(),
            Init::RandomUniform => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                let half_width = 1.0 / n as f64;
                DVector::from_fn(n, |_, _| rng.random_range(-half_width..=half_width))
            }
        }
    }
}

/// One row of the convergence trace: the state at the start of iteration `t`
/// and the step taken from it.
#[derive(Debug, Clone, PartialEq)]
pub struct IterateState {
    pub t: usize,
    pub w: DVector<f64>,
    pub y: f64,
    pub objective_total: f64,
    /// `‖∇f(wᵗ)‖₂`
    pub smooth_grad_norm: f64,
    /// Step taken from this iterate; 0 on the terminal record.
    pub gamma: f64,
    pub nnz: usize,
    pub subproblem_iters: usize,
    /// `‖Bwᵗ − wᵗ‖∞`
    pub gap: f64,
    /// False when the inner solver hit its cap and its best iterate was used.
    pub inner_converged: bool,
    pub wall_time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Tolerance,
    MaxIters,
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::Tolerance => "tolerance",
            Termination::MaxIters => "max_iters",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTrace {
    pub records: Vec<IterateState>,
    pub terminated_by: Termination,
}

impl ConvergenceTrace {
    pub fn last(&self) -> &IterateState {
        self.records
            .last()
            .expect("trace always holds the initial record")
    }

    pub fn total_wall_time(&self) -> f64 {
        self.records.iter().map(|r| r.wall_time).sum()
    }
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub w: DVector<f64>,
    pub y: f64,
    pub trace: ConvergenceTrace,
}

pub fn count_nonzero(w: &DVector<f64>) -> usize {
    w.iter().filter(|v| v.abs() > NNZ_THRESHOLD).count()
}

/// Runs the outer loop to tolerance or the iteration cap.
pub fn run(config: &SolverConfig, moments: &MomentSet) -> Result<SolveOutcome> {
    let n = moments.n();
    config.validate(n)?;
    let params = ObjectiveParams::new(config.lambdas, moments.clone())?;
    let lambda4 = params.lambda4;

    let mut w = config.initial_weights(n);
    let mut y = lambda4 * l1_norm(&w);
    let mut records = Vec::new();

    for t in 0.. {
        let started = Instant::now();
        let objective = params.evaluate(&w)?.total;
        if !objective.is_finite() {
            return Err(Error::Divergence {
                iteration: t,
                detail: format!("objective evaluated to {objective}"),
            });
        }
        let grad_norm = params.smooth_gradient(&w)?.norm();
        if !grad_norm.is_finite() {
            return Err(Error::Divergence {
                iteration: t,
                detail: format!("smooth gradient norm evaluated to {grad_norm}"),
            });
        }

        let model = build_surrogate(&params, &w, config.epsilon_floor)?;
        let (inner, inner_converged) = match solve_subproblem(&model, lambda4, &config.inner, &w) {
            Ok(sol) => (sol, true),
            Err(Error::NotConverged {
                best,
                residual,
                iters,
            }) => (
                InnerSolution {
                    y_star: lambda4 * l1_norm(&best),
                    w_star: best,
                    iters_used: iters,
                    final_step_delta: f64::NAN,
                    lipschitz: model.lipschitz().unwrap_or(f64::NAN),
                    residual,
                },
                false,
            ),
            Err(Error::Unbounded(detail)) => {
                return Err(Error::Divergence {
                    iteration: t,
                    detail: format!("convex subproblem unbounded: {detail}"),
                })
            }
            Err(e) => return Err(e),
        };

        let direction = &inner.w_star - &w;
        let gap = inf_norm(&direction);
        let mut record = IterateState {
            t,
            w: w.clone(),
            y,
            objective_total: objective,
            smooth_grad_norm: grad_norm,
            gamma: 0.0,
            nnz: count_nonzero(&w),
            subproblem_iters: inner.iters_used,
            gap,
            inner_converged,
            wall_time: 0.0,
        };

        let done = if gap <= config.outer_tol {
            Some(Termination::Tolerance)
        } else if t >= config.max_outer_iters {
            Some(Termination::MaxIters)
        } else {
            None
        };
        if let Some(reason) = done {
            record.wall_time = started.elapsed().as_secs_f64();
            records.push(record);
            return Ok(SolveOutcome {
                w,
                y,
                trace: ConvergenceTrace {
                    records,
                    terminated_by: reason,
                },
            });
        }

        let y_delta = inner.y_star - y;
        let gamma = exact_line_search(&params, &w, &direction, y, y_delta)?;
        w += &direction * gamma;
        y += gamma * y_delta;
        if config.epigraph == EpigraphUpdate::Tight {
            y = lambda4 * l1_norm(&w);
        }
        if !y.is_finite() || w.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence {
                iteration: t,
                detail: "weights became non-finite".into(),
            });
        }

        record.gamma = gamma;
        record.wall_time = started.elapsed().as_secs_f64();
        records.push(record);
    }
    unreachable!("outer loop returns on termination")
}

/// `φ(γ) = c0 + c1 γ + c2 γ² + c3 γ³`, the line-search objective along a segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cubic {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl Cubic {
    pub fn eval(&self, gamma: f64) -> f64 {
        self.c0 + gamma * (self.c1 + gamma * (self.c2 + gamma * self.c3))
    }

    /// Exact minimizer on `[0, 1]`. Candidates are the endpoints and the
    /// interior critical points; ties go to the larger step.
    pub fn argmin_unit(&self) -> f64 {
        let mut candidates = vec![0.0, 1.0];
        candidates.extend(
            quadratic_roots(3.0 * self.c3, 2.0 * self.c2, self.c1)
                .into_iter()
                .filter(|g| g.is_finite() && *g > 0.0 && *g < 1.0),
        );
        candidates.sort_by(f64::total_cmp);
        let mut best = (f64::INFINITY, 0.0);
        for g in candidates {
            let v = self.eval(g);
            if v <= best.0 {
                best = (v, g);
            }
        }
        best.1
    }
}

/// Real roots of `a x² + b x + c`, using the cancellation-free form.
fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    if a == 0.0 {
        return if b == 0.0 { vec![] } else { vec![-c / b] };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return vec![];
    }
    let q = -0.5 * (b + disc.sqrt().copysign(b));
    if q == 0.0 {
        // b = 0 and c = 0
        return vec![0.0];
    }
    vec![q / a, c / q]
}

/// Coefficients of `φ(γ) = f(w + γd) + y + γ·y_delta`. Valid for
/// supersymmetric Φ.
pub fn line_search_cubic(
    params: &ObjectiveParams,
    w: &DVector<f64>,
    d: &DVector<f64>,
    y: f64,
    y_delta: f64,
) -> Result<Cubic> {
    params.check(w)?;
    params.check(d)?;
    let m = params.moments();
    let phi = m.phi();
    let sigma_d = m.sigma() * d;
    let (t_dww, t_ddw, t_ddd) = if params.lambda3 == 0.0 {
        (0.0, 0.0, 0.0)
    } else {
        (
            phi.trilinear(d, w, w)?,
            phi.trilinear(d, d, w)?,
            phi.trilinear(d, d, d)?,
        )
    };
    Ok(Cubic {
        c0: params.smooth_value(w)? + y,
        c1: -params.lambda1 * d.dot(m.mu()) + 2.0 * params.lambda2 * w.dot(&sigma_d)
            - 3.0 * params.lambda3 * t_dww
            + y_delta,
        c2: params.lambda2 * quad_form(m.sigma(), d) - 3.0 * params.lambda3 * t_ddw,
        c3: -params.lambda3 * t_ddd,
    })
}

/// Exact minimizer over `γ ∈ [0, 1]` of `f(w + γd) + y + γ·y_delta`.
pub fn exact_line_search(
    params: &ObjectiveParams,
    w: &DVector<f64>,
    d: &DVector<f64>,
    y: f64,
    y_delta: f64,
) -> Result<f64> {
    Ok(line_search_cubic(params, w, d, y, y_delta)?.argmin_unit())
}

/// Natural-map residual `‖w − prox(w − ∇f(w), λ4)‖∞`; zero exactly at
/// stationary points of `f + λ4 ‖·‖₁`.
pub fn stationarity_residual(params: &ObjectiveParams, w: &DVector<f64>) -> Result<f64> {
    let g = params.smooth_gradient(w)?;
    let mapped = soft_threshold(&(w - g), params.lambda4);
    Ok(inf_norm(&(w - mapped)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::estimate_moments;
    use crate::surrogate::QuadraticModel;
    use crate::synthetic::SkewedReturns;
    use nalgebra::DMatrix;

    fn moments(n: usize, seed: u64) -> MomentSet {
        estimate_moments(&SkewedReturns::new(n, 300).seed(seed).generate().unwrap())
    }

    fn identity_moments(n: usize) -> MomentSet {
        MomentSet::new(
            DVector::zeros(n),
            DMatrix::identity(n, n),
            DMatrix::zeros(n, n * n),
        )
        .unwrap()
    }

    #[test]
    fn zero_start_on_pure_variance_converges_immediately() {
        let mut cfg = SolverConfig::new([0.0, 1.0, 0.0, 0.0]);
        cfg.init = Init::Zeros;
        let out = run(&cfg, &identity_moments(3)).unwrap();
        assert_eq!(out.trace.records.len(), 1);
        assert_eq!(out.trace.terminated_by, Termination::Tolerance);
        assert_eq!(out.w, DVector::zeros(3));
    }

    #[test]
    fn convex_case_takes_one_full_step() {
        let m = moments(4, 1);
        let mut cfg = SolverConfig::new([1.0, 4.0, 0.0, 0.05]);
        cfg.inner.tol = 1e-13;
        cfg.inner.max_iters = 100_000;
        let out = run(&cfg, &m).unwrap();
        assert_eq!(out.trace.terminated_by, Termination::Tolerance);
        assert!((out.trace.records[0].gamma - 1.0).abs() < 1e-6);

        let direct = QuadraticModel::new(m.sigma() * 8.0, m.mu() * -1.0, 0.0)
            .unwrap()
            .with_eigen()
            .unwrap();
        let lasso = solve_subproblem(&direct, 0.05, &cfg.inner, &DVector::zeros(4)).unwrap();
        assert!((&out.w - &lasso.w_star).amax() < 1e-8);
    }

    #[test]
    fn nonconvex_run_descends_and_is_stationary() {
        let cfg = SolverConfig::new([1.0, 2.0, 1.0, 0.1]);
        let out = run(&cfg, &moments(3, 2)).unwrap();
        let objs: Vec<f64> = out
            .trace
            .records
            .iter()
            .map(|r| r.objective_total)
            .collect();
        for pair in objs.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-12, "{pair:?}");
        }
        let params = ObjectiveParams::new(cfg.lambdas, moments(3, 2)).unwrap();
        assert_eq!(out.trace.terminated_by, Termination::Tolerance);
        assert!(stationarity_residual(&params, &out.w).unwrap() <= 1e-6);
        for r in &out.trace.records {
            assert!(r.y >= cfg.lambdas[3] * l1_norm(&r.w) - 1e-12);
            assert!((0.0..=1.0).contains(&r.gamma));
        }
    }

    #[test]
    fn runs_are_deterministic() {
        let m = moments(5, 3);
        let cfg = SolverConfig::new([1.0, 3.0, 1.0, 0.05]);
        let a = run(&cfg, &m).unwrap();
        let b = run(&cfg, &m).unwrap();
        assert_eq!(a.trace.records.len(), b.trace.records.len());
        for (x, y) in a.trace.records.iter().zip(&b.trace.records) {
            assert_eq!(x.w, y.w);
            assert_eq!(x.objective_total.to_bits(), y.objective_total.to_bits());
            assert_eq!(x.gamma.to_bits(), y.gamma.to_bits());
        }
    }

    #[test]
    fn degenerate_direction_picks_full_step() {
        let m = moments(3, 4);
        let p = ObjectiveParams::new([1.0, 1.0, 1.0, 0.1], m).unwrap();
        let w = DVector::from_vec(vec![0.1, -0.2, 0.05]);
        assert_eq!(
            exact_line_search(&p, &w, &DVector::zeros(3), 0.0, 0.0).unwrap(),
            1.0
        );
    }

    #[test]
    fn parabola_vertex() {
        let c = Cubic {
            c0: 1.0,
            c1: -1.0,
            c2: 2.0,
            c3: 0.0,
        };
        assert_eq!(c.argmin_unit(), 0.25);
        let c = Cubic {
            c0: 1.0,
            c1: -5.0,
            c2: 2.0,
            c3: 0.0,
        };
        assert_eq!(c.argmin_unit(), 1.0);
        let c = Cubic {
            c0: 1.0,
            c1: 5.0,
            c2: 2.0,
            c3: 0.0,
        };
        assert_eq!(c.argmin_unit(), 0.0);
    }

    #[test]
    fn cubic_with_interior_local_min_and_better_endpoint() {
        // φ'(γ) = −3(γ − 0.2)(γ − 0.6): local min at 0.2, but φ(1) is lower
        let c = Cubic {
            c0: 0.0,
            c1: -0.36,
            c2: 1.2,
            c3: -1.0,
        };
        let g = c.argmin_unit();
        assert_eq!(g, 1.0);
        let local = Cubic {
            c0: 0.0,
            c1: -0.36,
            c2: 1.2,
            c3: -0.5,
        };
        let g = local.argmin_unit();
        let grid_best = (0..=10_000)
            .map(|k| local.eval(k as f64 * 1e-4))
            .fold(f64::INFINITY, f64::min);
        assert!(local.eval(g) <= grid_best + 1e-12);
    }

    #[test]
    fn residual_examples() {
        let m = MomentSet::new(
            DVector::zeros(1),
            DMatrix::from_element(1, 1, 0.5),
            DMatrix::zeros(1, 1),
        )
        .unwrap();
        let p = ObjectiveParams::new([0.0, 1.0, 0.0, 0.0], m).unwrap();
        assert_eq!(stationarity_residual(&p, &DVector::zeros(1)).unwrap(), 0.0);
        let w = DVector::from_element(1, 3.0);
        let g = p.smooth_gradient(&w).unwrap();
        assert!((stationarity_residual(&p, &w).unwrap() - g[0].abs()).abs() < 1e-15);
    }

    #[test]
    fn dominant_l1_weight_gives_zero_portfolio() {
        let m = moments(6, 5);
        let base = ObjectiveParams::new([1.0, 4.0, 1.0, 0.0], m.clone()).unwrap();
        let g0 = inf_norm(&base.smooth_gradient(&DVector::zeros(6)).unwrap());
        let cfg = SolverConfig::new([1.0, 4.0, 1.0, 10.0 * g0]);
        let out = run(&cfg, &m).unwrap();
        assert_eq!(count_nonzero(&out.w), 0);
    }

    #[test]
    fn invalid_config_lists_every_problem() {
        let mut cfg = SolverConfig::new([-1.0, 1.0, 1.0, f64::INFINITY]);
        cfg.outer_tol = 0.0;
        cfg.init = Init::Given(DVector::zeros(2));
        match cfg.validate(3) {
            Err(Error::Config(msgs)) => assert_eq!(msgs.len(), 4, "{msgs:?}"),
            other => panic!("{other:?}"),
        }
    }
}
