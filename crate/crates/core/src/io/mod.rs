//! File formats and the command implementations behind the `sparse-mvs` binary.
//!
//! All writers go through [`write_atomic`]: content lands in a temporary
//! sibling file which is then renamed over the target.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

pub mod commands;
pub mod config;
pub mod matrix;
pub mod moments_file;
pub mod returns_csv;
pub mod summary;
pub mod svg;
pub mod trace;

pub use commands::{cmd_check_bound, cmd_estimate, cmd_solve, cmd_sweep, Input};

/// Floats are written with 17 significant digits, which round-trips every f64.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_atomic(path: &Path, content: &str) -> Result<()> {
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::Invalid(format!("{} is not a file path", path.display())))?;
    let mut tmp_name = file_name.to_os_string();
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    fs::write(&tmp, content).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

pub(crate) fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub(crate) fn parse_f64(token: &str, line: usize, column: usize) -> Result<f64> {
    let v: f64 = token
        .trim()
        .parse()
        .map_err(|_| Error::parse(line, column, format!("not a number: {:?}", token.trim())))?;
    if !v.is_finite() {
        return Err(Error::parse(
            line,
            column,
            format!("non-finite value {:?}", token.trim()),
        ));
    }
    Ok(v)
}
