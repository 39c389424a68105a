//! The `estimate`, `solve`, `sweep` and `check-bound` commands.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use nalgebra::DVector;
use rayon::prelude::*;

use super::config::read_config;
use super::matrix::{read_matrix, read_weights, write_weights};
use super::moments_file::{read_moments, write_moments, MomentsFile};
use super::returns_csv::read_returns;
use super::summary::{write_summary, Summary};
use super::svg::{line_plot, GRADIENT_TITLE, OBJECTIVE_TITLE};
use super::trace::write_trace;
use super::{fmt_f64, write_atomic};
use crate::error::{Error, Result};
use crate::linalg::l1_norm;
use crate::moments::{estimate_moments, MomentSet};
use crate::objective::{risk_error_bound, ObjectiveParams, RiskBound};
use crate::sca_driver::{count_nonzero, run, stationarity_residual, SolverConfig, Termination};

/// Process exit codes of the binary.
pub mod exit {
    pub const TOLERANCE: i32 = 0;
    pub const ERROR: i32 = 1;
    pub const MAX_ITERS: i32 = 2;
    pub const DIVERGENCE: i32 = 3;
}

pub const WEIGHTS_FILE: &str = "weights.json";
pub const TRACE_FILE: &str = "trace.csv";
pub const OBJECTIVE_PLOT: &str = "fig1.svg";
pub const GRADIENT_PLOT: &str = "fig2.svg";
pub const SUMMARY_FILE: &str = "summary.txt";
pub const SWEEP_FILE: &str = "sweep.csv";

/// Where the moments for a run come from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Input {
    Returns(PathBuf),
    Moments(PathBuf),
}

pub fn load_input(input: &Input) -> Result<MomentsFile> {
    match input {
        Input::Returns(path) => {
            let returns = read_returns(path)?;
            Ok(MomentsFile {
                moments: estimate_moments(&returns),
                assets: returns.labels(),
            })
        }
        Input::Moments(path) => read_moments(path),
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Estimates moments from a returns CSV and writes them to `out_path`.
pub fn cmd_estimate(returns_csv: &Path, out_path: &Path) -> Result<MomentSet> {
    let returns = read_returns(returns_csv)?;
    let moments = estimate_moments(&returns);
    write_moments(out_path, &moments, &returns.labels())?;
    Ok(moments)
}

#[derive(Debug, Clone, PartialEq)]
pub enum RunStatus {
    Converged,
    MaxIters,
    Diverged(String),
}

impl RunStatus {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunStatus::Converged => exit::TOLERANCE,
            RunStatus::MaxIters => exit::MAX_ITERS,
            RunStatus::Diverged(_) => exit::DIVERGENCE,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            RunStatus::Converged => Termination::Tolerance.as_str(),
            RunStatus::MaxIters => Termination::MaxIters.as_str(),
            RunStatus::Diverged(_) => "divergence",
        }
    }
}

/// Everything a solve wrote, for callers that want to inspect it.
#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub dir: PathBuf,
    pub status: RunStatus,
    pub assets: Vec<String>,
    pub weights: Option<DVector<f64>>,
    pub summary: Summary,
}

/// Runs the solver and writes weights, trace, both plots and the summary.
pub fn cmd_solve(input: &Input, config_path: &Path, out_dir: &Path) -> Result<RunArtifacts> {
    let config = read_config(config_path)?;
    let loaded = load_input(input)?;
    solve_into(out_dir, &loaded, &config)
}

/// Solves one configuration against loaded moments, writing into `dir`.
pub fn solve_into(dir: &Path, loaded: &MomentsFile, config: &SolverConfig) -> Result<RunArtifacts> {
    config.validate(loaded.moments.n())?;
    create_dir(dir)?;
    let started = Instant::now();
    let outcome = run(config, &loaded.moments);
    let wall = started.elapsed().as_secs_f64();

    let outcome = match outcome {
        Ok(o) => o,
        Err(Error::Divergence { iteration, detail }) => {
            let diagnostic = Error::Divergence { iteration, detail }.to_string();
            let summary = Summary {
                termination: "divergence".into(),
                iterations: iteration,
                wall_time_s: wall,
                final_objective: f64::NAN,
                final_nnz: 0,
                stationarity_residual: f64::NAN,
                weights_l1: f64::NAN,
                weights_sum: f64::NAN,
                diagnostic: Some(diagnostic.clone()),
                config: config.clone(),
            };
            write_summary(&dir.join(SUMMARY_FILE), &summary)?;
            return Ok(RunArtifacts {
                dir: dir.to_path_buf(),
                status: RunStatus::Diverged(diagnostic),
                assets: loaded.assets.clone(),
                weights: None,
                summary,
            });
        }
        Err(e) => return Err(e),
    };

    let params = ObjectiveParams::new(config.lambdas, loaded.moments.clone())?;
    let trace = &outcome.trace;
    let w = &outcome.w;

    write_weights(&dir.join(WEIGHTS_FILE), &loaded.assets, w)?;
    write_trace(&dir.join(TRACE_FILE), trace)?;
    let ts: Vec<f64> = trace.records.iter().map(|r| r.t as f64).collect();
    let objective: Vec<f64> = trace.records.iter().map(|r| r.objective_total).collect();
    let grad: Vec<f64> = trace.records.iter().map(|r| r.smooth_grad_norm).collect();
    write_atomic(
        &dir.join(OBJECTIVE_PLOT),
        &line_plot(OBJECTIVE_TITLE, "objective", &ts, &objective),
    )?;
    write_atomic(
        &dir.join(GRADIENT_PLOT),
        &line_plot(GRADIENT_TITLE, "gradient L2 norm", &ts, &grad),
    )?;

    let status = match trace.terminated_by {
        Termination::Tolerance => RunStatus::Converged,
        Termination::MaxIters => RunStatus::MaxIters,
    };
    let skipped_inner = trace.records.iter().filter(|r| !r.inner_converged).count();
    let summary = Summary {
        termination: status.label().into(),
        iterations: trace.records.len(),
        wall_time_s: wall,
        final_objective: trace.last().objective_total,
        final_nnz: count_nonzero(w),
        stationarity_residual: stationarity_residual(&params, w)?,
        weights_l1: l1_norm(w),
        weights_sum: w.sum(),
        diagnostic: (skipped_inner > 0).then(|| {
            format!("inner solver hit its iteration cap on {skipped_inner} outer iterations")
        }),
        config: config.clone(),
    };
    write_summary(&dir.join(SUMMARY_FILE), &summary)?;

    Ok(RunArtifacts {
        dir: dir.to_path_buf(),
        status,
        assets: loaded.assets.clone(),
        weights: Some(outcome.w),
        summary,
    })
}

/// Parses `v1,v2,...` and checks it is non-empty, non-negative and strictly increasing.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let grid = text
        .split(',')
        .enumerate()
        .map(|(i, s)| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::parse(1, i + 1, format!("grid value {s:?} is not a number")))
        })
        .collect::<Result<Vec<f64>>>()?;
    validate_grid(&grid)?;
    Ok(grid)
}

pub fn validate_grid(grid: &[f64]) -> Result<()> {
    let mut bad = Vec::new();
    if grid.is_empty() {
        bad.push("lambda4 grid is empty".to_string());
    }
    if let Some(v) = grid.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        bad.push(format!("lambda4 grid value {v} must be finite and >= 0"));
    }
    if grid.windows(2).any(|p| p[1] <= p[0]) {
        bad.push("lambda4 grid must be strictly increasing".to_string());
    }
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Error::Config(bad))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub lambda4: f64,
    pub status: String,
    pub nnz: Option<usize>,
    pub objective: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub warnings: Vec<String>,
}

pub fn point_dir(out_dir: &Path, index: usize) -> PathBuf {
    out_dir.join(format!("lambda4_{index:03}"))
}

/// One solve per grid value, in parallel, each in its own subdirectory.
/// Failing points are recorded in the report instead of aborting the sweep.
pub fn cmd_sweep(
    input: &Input,
    config_path: &Path,
    grid: &[f64],
    out_dir: &Path,
) -> Result<SweepReport> {
    validate_grid(grid)?;
    let base = read_config(config_path)?;
    let loaded = load_input(input)?;
    sweep_into(out_dir, &loaded, &base, grid)
}

pub fn sweep_into(
    out_dir: &Path,
    loaded: &MomentsFile,
    base: &SolverConfig,
    grid: &[f64],
) -> Result<SweepReport> {
    validate_grid(grid)?;
    create_dir(out_dir)?;
    let rows: Vec<SweepRow> = grid
        .par_iter()
        .enumerate()
        .map(|(i, &lambda4)| {
            let mut config = base.clone();
            config.lambdas[3] = lambda4;
            match solve_into(&point_dir(out_dir, i), loaded, &config) {
                Ok(art) => SweepRow {
                    lambda4,
                    status: art.status.label().into(),
                    nnz: art.weights.as_ref().map(|_| art.summary.final_nnz),
                    objective: art.summary.final_objective,
                    residual: art.summary.stationarity_residual,
                },
                Err(e) => SweepRow {
                    lambda4,
                    status: format!("error: {e}"),
                    nnz: None,
                    objective: f64::NAN,
                    residual: f64::NAN,
                },
            }
        })
        .collect();

    let mut warnings = Vec::new();
    let solved: Vec<&SweepRow> = rows.iter().filter(|r| r.nnz.is_some()).collect();
    for pair in solved.windows(2) {
        if pair[1].nnz > pair[0].nnz {
            warnings.push(format!(
                "nnz rose from {} at lambda4 = {} to {} at lambda4 = {}",
                pair[0].nnz.unwrap_or(0),
                pair[0].lambda4,
                pair[1].nnz.unwrap_or(0),
                pair[1].lambda4
            ));
        }
    }
    for r in rows.iter().filter(|r| r.nnz.is_none()) {
        warnings.push(format!("lambda4 = {}: {}", r.lambda4, r.status));
    }

    write_atomic(&out_dir.join(SWEEP_FILE), &format_sweep(&rows))?;
    Ok(SweepReport { rows, warnings })
}

pub fn format_sweep(rows: &[SweepRow]) -> String {
    let mut out = String::from("lambda4,nnz,objective,residual,status\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_f64(r.lambda4),
            r.nnz.map_or_else(String::new, |n| n.to_string()),
            fmt_f64(r.objective),
            fmt_f64(r.residual),
            r.status.replace(',', ";")
        ));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub bound: RiskBound,
}

impl BoundReport {
    pub fn passed(&self) -> bool {
        self.bound.holds()
    }
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "bound = {}", fmt_f64(self.bound.bound))?;
        writeln!(f, "actual = {}", fmt_f64(self.bound.actual))?;
        write!(
            f,
            "result = {}",
            if self.passed() { "PASS" } else { "FAIL" }
        )
    }
}

pub fn cmd_check_bound(sigma_hat: &Path, sigma: &Path, weights: &Path) -> Result<BoundReport> {
    let sigma_hat = read_matrix(sigma_hat)?;
    let sigma = read_matrix(sigma)?;
    let w = read_weights(weights)?;
    Ok(BoundReport {
        bound: risk_error_bound(&sigma_hat, &sigma, &w.values)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert_eq!(parse_grid("0, 0.1,1").unwrap(), vec![0.0, 0.1, 1.0]);
        assert!(parse_grid("0.1,0.1").is_err());
        assert!(parse_grid("-1").is_err());
        assert!(parse_grid("a").is_err());
        assert!(validate_grid(&[]).is_err());
    }

    #[test]
    fn exit_codes_are_stable() {
        assert_eq!(RunStatus::Converged.exit_code(), 0);
        assert_eq!(RunStatus::MaxIters.exit_code(), 2);
        assert_eq!(RunStatus::Diverged(String::new()).exit_code(), 3);
    }
}
