//! `key = value` solver configuration.
//!
//! Recognised keys: `lambda1`..`lambda4` (required), `max_outer_iters`,
//! `outer_tol`, `inner_max_iters`, `inner_tol`, `epsilon_floor`, `seed` and
//! `init` (`random_uniform`, `zeros`, or a comma-separated weight list).
//! Blank lines and `#` comments are ignored; unknown or repeated keys are
//! errors. Every problem in a file is reported together.

use std::collections::HashMap;
use std::path::Path;

use nalgebra::DVector;

use super::read_to_string;
use crate::error::{Error, Result};
use crate::sca_driver::{Init, SolverConfig};

pub const KEYS: [&str; 11] = [
    "lambda1",
    "lambda2",
    "lambda3",
    "lambda4",
    "max_outer_iters",
    "outer_tol",
    "inner_max_iters",
    "inner_tol",
    "epsilon_floor",
    "seed",
    "init",
];

pub fn read_config(path: &Path) -> Result<SolverConfig> {
    parse_config(&read_to_string(path)?)
}

pub fn parse_config(text: &str) -> Result<SolverConfig> {
    let mut problems = Vec::new();
    let mut entries: HashMap<&str, (usize, &str)> = HashMap::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            problems.push(format!("line {line}: expected `key = value`"));
            continue;
        };
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            problems.push(format!("line {line}: unknown key {key:?}"));
        } else if entries.insert(key, (line, value)).is_some() {
            problems.push(format!("line {line}: duplicate key {key:?}"));
        }
    }

    let mut lambdas = [0.0; 4];
    for (i, slot) in lambdas.iter_mut().enumerate() {
        let key = KEYS[i];
        match entries.get(key) {
            None => problems.push(format!("missing required key {key:?}")),
            Some(&(line, v)) => match v.parse::<f64>() {
                Ok(x) => *slot = x,
                Err(_) => problems.push(format!("line {line}: {key} = {v:?} is not a number")),
            },
        }
    }

    let mut config = SolverConfig::new(lambdas);
    let number = |key: &str, problems: &mut Vec<String>| -> Option<f64> {
        let &(line, v) = entries.get(key)?;
        v.parse::<f64>()
            .map_err(|_| problems.push(format!("line {line}: {key} = {v:?} is not a number")))
            .ok()
    };
    if let Some(v) = number("outer_tol", &mut problems) {
        config.outer_tol = v;
    }
    if let Some(v) = number("inner_tol", &mut problems) {
        config.inner.tol = v;
    }
    if let Some(v) = number("epsilon_floor", &mut problems) {
        config.epsilon_floor = v;
    }

    let integer = |key: &str, problems: &mut Vec<String>| -> Option<u64> {
        let &(line, v) = entries.get(key)?;
        v.parse::<u64>()
            .map_err(|_| {
                problems.push(format!(
                    "line {line}: {key} = {v:?} is not a non-negative integer"
                ))
            })
            .ok()
    };
    if let Some(v) = integer("max_outer_iters", &mut problems) {
        config.max_outer_iters = v as usize;
    }
    if let Some(v) = integer("inner_max_iters", &mut problems) {
        config.inner.max_iters = v as usize;
    }
    if let Some(v) = integer("seed", &mut problems) {
        config.seed = v;
    }

    if let Some(&(line, v)) = entries.get("init") {
        match v {
            "random_uniform" => config.init = Init::RandomUniform,
            "zeros" => config.init = Init::Zeros,
            list => match list
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<f64>, _>>()
            {
                Ok(w) => config.init = Init::Given(DVector::from_vec(w)),
                Err(_) => problems.push(format!(
                    "line {line}: init must be random_uniform, zeros or a comma-separated weight list"
                )),
            },
        }
    }

    // range checks that do not depend on the asset count
    if let Err(Error::Config(range)) = config.validate(match &config.init {
        Init::Given(w) => w.len(),
        _ => 1,
    }) {
        problems.extend(range);
    }

    if problems.is_empty() {
        Ok(config)
    } else {
        Err(Error::Config(problems))
    }
}

/// Writes every effective setting so the text parses back to `config`.
pub fn format_config(config: &SolverConfig) -> String {
    let init = match &config.init {
        Init::RandomUniform => "random_uniform".to_string(),
        Init::Zeros => "zeros".to_string(),
        Init::Given(w) => w
            .iter()
            .map(|v| format!("{v:?}"))
            .collect::<Vec<_>>()
            .join(","),
    };
    let [l1, l2, l3, l4] = config.lambdas;
    format!(
        "lambda1 = {l1:?}\nlambda2 = {l2:?}\nlambda3 = {l3:?}\nlambda4 = {l4:?}\n\
         max_outer_iters = {}\nouter_tol = {:?}\ninner_max_iters = {}\ninner_tol = {:?}\n\
         epsilon_floor = {:?}\nseed = {}\ninit = {init}\n",
        config.max_outer_iters,
        config.outer_tol,
        config.inner.max_iters,
        config.inner.tol,
        config.epsilon_floor,
        config.seed,
    )
}
