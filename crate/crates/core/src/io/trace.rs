//! Per-iteration trace as CSV: `t,objective,grad_l2,gamma,nnz,inner_iters`.

use std::path::Path;

use super::{fmt_f64, parse_f64, read_to_string, write_atomic};
use crate::error::{Error, Result};
use crate::sca_driver::ConvergenceTrace;

pub const HEADER: &str = "t,objective,grad_l2,gamma,nnz,inner_iters";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub t: usize,
    pub objective: f64,
    pub grad_l2: f64,
    pub gamma: f64,
    pub nnz: usize,
    pub inner_iters: usize,
}

pub fn rows(trace: &ConvergenceTrace) -> Vec<TraceRow> {
    trace
        .records
        .iter()
        .map(|r| TraceRow {
            t: r.t,
            objective: r.objective_total,
            grad_l2: r.smooth_grad_norm,
            gamma: r.gamma,
            nnz: r.nnz,
            inner_iters: r.subproblem_iters,
        })
        .collect()
}

pub fn format_trace(trace: &ConvergenceTrace) -> String {
    let mut out = String::from(HEADER);
    out.push('\n');
    for r in rows(trace) {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.t,
            fmt_f64(r.objective),
            fmt_f64(r.grad_l2),
            fmt_f64(r.gamma),
            r.nnz,
            r.inner_iters
        ));
    }
    out
}

pub fn write_trace(path: &Path, trace: &ConvergenceTrace) -> Result<()> {
    write_atomic(path, &format_trace(trace))
}

pub fn parse_trace(text: &str) -> Result<Vec<TraceRow>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == HEADER => {}
        _ => return Err(Error::parse(1, 1, format!("expected header {HEADER:?}"))),
    }
    let int = |tok: &str, line: usize, col: usize| -> Result<usize> {
        tok.trim()
            .parse()
            .map_err(|_| Error::parse(line, col, format!("not an integer: {tok:?}")))
    };
    lines
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(idx, l)| {
            let line = idx + 1;
            let cells: Vec<&str> = l.split(',').collect();
            if cells.len() != 6 {
                return Err(Error::dim(format!(
                    "line {line} has {} fields, expected 6",
                    cells.len()
                )));
            }
            Ok(TraceRow {
                t: int(cells[0], line, 1)?,
                objective: parse_f64(cells[1], line, 2)?,
                grad_l2: parse_f64(cells[2], line, 3)?,
                gamma: parse_f64(cells[3], line, 4)?,
                nnz: int(cells[4], line, 5)?,
                inner_iters: int(cells[5], line, 6)?,
            })
        })
        .collect()
}

pub fn read_trace(path: &Path) -> Result<Vec<TraceRow>> {
    parse_trace(&read_to_string(path)?)
}
