//! Solve an l1-penalized quadratic with the inner proximal-gradient solver and
//! confirm the soft-threshold fixed point.

use nalgebra::{DMatrix, DVector};
use sparse_mvs::inner_solver::fixed_point_residual;
use sparse_mvs::{solve_subproblem, InnerSettings, QuadraticModel, StepRule};

fn main() -> sparse_mvs::Result<()> {
    let a = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 0.0, 1.0, 3.0, 0.5, 0.0, 0.5, 2.0]);
    let b = DVector::from_vec(vec![-3.0, 0.4, -1.5]);
    let model = QuadraticModel::new(a, b, 0.0)?.with_eigen()?;
    let lambda4 = 0.5;

    for rule in [StepRule::FixedLipschitz, StepRule::Backtracking] {
        let settings = InnerSettings {
            step_rule: rule,
            ..InnerSettings::default()
        };
        let sol = solve_subproblem(&model, lambda4, &settings, &DVector::zeros(3))?;
        let res = fixed_point_residual(&model, lambda4, sol.lipschitz, &sol.w_star)?;
        println!(
            "{rule:?}: w* = {:?}  y* = {:.8}  iters = {}  residual = {res:.1e}",
            sol.w_star.as_slice(),
            sol.y_star,
            sol.iters_used
        );
    }
    Ok(())
}
