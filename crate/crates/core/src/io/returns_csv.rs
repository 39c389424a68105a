//! Returns panels as comma-separated text.
//!
//! One row per period, one column per asset. The first row is taken as a
//! header when any of its cells is not a number. Missing cells are errors.

use std::path::Path;

use nalgebra::DMatrix;

use super::{fmt_f64, parse_f64, read_to_string, write_atomic};
use crate::error::{Error, Result};
use crate::moments::ReturnsMatrix;

pub fn parse_returns(text: &str) -> Result<ReturnsMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let mut header: Option<Vec<String>> = None;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width: Option<usize> = None;

    for (idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(idx + 1, |p| p.line() as usize);
            Error::parse(line, 1, e.to_string())
        })?;
        let line = record.position().map_or(idx + 1, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        if idx == 0 && record.iter().any(|c| c.parse::<f64>().is_err()) {
            header = Some(record.iter().map(str::to_string).collect());
            width = Some(record.len());
            continue;
        }
        match width {
            Some(w) if w != record.len() => {
                return Err(Error::dim(format!(
                    "line {line} has {} fields, expected {w}",
                    record.len()
                )))
            }
            _ => width = Some(record.len()),
        }
        let row = record
            .iter()
            .enumerate()
            .map(|(col, cell)| {
                if cell.is_empty() {
                    Err(Error::parse(line, col + 1, "missing value"))
                } else {
                    parse_f64(cell, line, col + 1)
                }
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }

    if rows.is_empty() {
        return Err(Error::parse(1, 1, "no data rows"));
    }
    let t = rows.len();
    let n = rows[0].len();
    let data = DMatrix::from_fn(t, n, |i, j| rows[i][j]);
    ReturnsMatrix::new(data, header)
}

pub fn read_returns(path: &Path) -> Result<ReturnsMatrix> {
    parse_returns(&read_to_string(path)?)
}

pub fn format_returns(returns: &ReturnsMatrix) -> String {
    let mut out = returns.labels().join(",");
    out.push('\n');
    for row in returns.data().row_iter() {
        let cells: Vec<String> = row.iter().map(|v| fmt_f64(*v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn write_returns(path: &Path, returns: &ReturnsMatrix) -> Result<()> {
    write_atomic(path, &format_returns(returns))
}
