//! Sparse mean-variance-skewness portfolio selection.
//!
//! Solves
//!
//! ```text
//! minimize  −λ1 wᵀμ + λ2 wᵀΣw − λ3 wᵀΦ(w ⊗ w) + λ4 ‖w‖₁
//! ```
//!
//! by successive convex approximation: at every iterate the skewness term is
//! replaced by a convexified second-order model, the resulting ℓ1-penalized
//! quadratic is solved by accelerated proximal gradient, and the iterate moves
//! toward that solution by an exact cubic line search.
//!
//! Modules, bottom up:
//!
//! - [`moments`]: sample μ, Σ, Φ and the skewness contractions.
//! - [`objective`]: objective terms, smooth gradient, risk-error bound.
//! - [`surrogate`]: convex quadratic models with eigenvalue clipping.
//! - [`inner_solver`]: soft thresholding and the lasso-form subproblem.
//! - [`sca_driver`]: the outer loop, line search and stationarity residual.
//! - [`io`]: file formats, plots and the command implementations behind the
//!   `sparse-mvs` binary.
//! - [`synthetic`]: a seeded skewed-returns generator.
//!
//! Every capability has a runnable example under `examples/`:
//!
//! | example | shows |
//! |---|---|
//! | `estimate_moments` | sample moments and skewness contractions |
//! | `solve_portfolio` | one full solve with its iteration trace |
//! | `surrogate_convexification` | the clipped quadratic model and its tangency |
//! | `inner_lasso` | the subproblem solver under both step rules |
//! | `line_search` | the exact cubic step against a grid |
//! | `sparsity_sweep` | holdings count as the l1 weight grows |
//! | `risk_bound` | covariance error versus the risk-error bound |
//! | `convergence_plots` | the `solve` command's files, including both plots |
//!
//! ```bash
//! cargo run --example solve_portfolio
//! ```

pub mod error;
pub mod inner_solver;
pub mod io;
pub mod linalg;
pub mod moments;
pub mod objective;
pub mod sca_driver;
pub mod surrogate;
pub mod synthetic;

pub use error::{Error, Result};
pub use inner_solver::{soft_threshold, solve_subproblem, InnerSettings, InnerSolution, StepRule};
pub use moments::{estimate_moments, Coskewness, MomentSet, ReturnsMatrix};
pub use objective::{risk_error_bound, ObjectiveBreakdown, ObjectiveParams, RiskBound};
pub use sca_driver::{
    exact_line_search, run, stationarity_residual, ConvergenceTrace, Init, IterateState,
    SolveOutcome, SolverConfig, Termination,
};
pub use surrogate::{build_surrogate, model_value, QuadraticModel};
pub use synthetic::SkewedReturns;
