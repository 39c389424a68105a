//! Run summary: `key = value` metadata followed by a `[config]` section that
//! holds the effective configuration in config-file syntax.

use std::collections::BTreeMap;
use std::path::Path;

use super::config::{format_config, parse_config};
use super::{fmt_f64, read_to_string, write_atomic};
use crate::error::{Error, Result};
use crate::sca_driver::SolverConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    /// `tolerance`, `max_iters` or `divergence`.
    pub termination: String,
    pub iterations: usize,
    pub wall_time_s: f64,
    pub final_objective: f64,
    pub final_nnz: usize,
    pub stationarity_residual: f64,
    pub weights_l1: f64,
    pub weights_sum: f64,
    pub diagnostic: Option<String>,
    pub config: SolverConfig,
}

pub fn format_summary(s: &Summary) -> String {
    let mut out = String::from("# sparse-mvs run summary\n");
    out.push_str(&format!("termination = {}\n", s.termination));
    out.push_str(&format!("iterations = {}\n", s.iterations));
    out.push_str(&format!("wall_time_s = {}\n", fmt_f64(s.wall_time_s)));
    out.push_str(&format!(
        "final_objective = {}\n",
        fmt_f64(s.final_objective)
    ));
    out.push_str(&format!("final_nnz = {}\n", s.final_nnz));
    out.push_str(&format!(
        "stationarity_residual = {}\n",
        fmt_f64(s.stationarity_residual)
    ));
    out.push_str(&format!("weights_l1 = {}\n", fmt_f64(s.weights_l1)));
    out.push_str(&format!("weights_sum = {}\n", fmt_f64(s.weights_sum)));
    if let Some(d) = &s.diagnostic {
        out.push_str(&format!("diagnostic = {}\n", d.replace('\n', " ")));
    }
    out.push_str("[config]\n");
    out.push_str(&format_config(&s.config));
    out
}

pub fn write_summary(path: &Path, s: &Summary) -> Result<()> {
    write_atomic(path, &format_summary(s))
}

/// Metadata entries and the effective configuration of a summary file.
pub fn parse_summary(text: &str) -> Result<(BTreeMap<String, String>, SolverConfig)> {
    let (head, config) = text
        .split_once("[config]\n")
        .ok_or_else(|| Error::parse(1, 1, "summary has no [config] section"))?;
    let meta = head
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .collect();
    Ok((meta, parse_config(config)?))
}

pub fn read_summary(path: &Path) -> Result<(BTreeMap<String, String>, SolverConfig)> {
    parse_summary(&read_to_string(path)?)
}
