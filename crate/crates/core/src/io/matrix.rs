//! Loose numeric inputs for the bound checker: matrices as delimited text and
//! weight vectors as either a JSON object or a plain number list.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde_json::{Map, Value};

use super::{parse_f64, read_to_string, write_atomic};
use crate::error::{Error, Result};

fn split_cells(line: &str) -> impl Iterator<Item = &str> {
    line.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
}

/// A square or rectangular matrix, one row per line, comma or whitespace
/// separated. `#` starts a comment.
pub fn parse_matrix(text: &str) -> Result<DMatrix<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        let row = split_cells(content)
            .enumerate()
            .map(|(c, tok)| parse_f64(tok, line, c + 1))
            .collect::<Result<Vec<f64>>>()?;
        if row.is_empty() {
            continue;
        }
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::dim(format!(
                    "line {line} has {} entries, expected {}",
                    row.len(),
                    first.len()
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::parse(1, 1, "no matrix rows"));
    }
    Ok(DMatrix::from_fn(rows.len(), rows[0].len(), |i, j| {
        rows[i][j]
    }))
}

pub fn read_matrix(path: &Path) -> Result<DMatrix<f64>> {
    parse_matrix(&read_to_string(path)?)
}

/// Weights in asset order, with their labels when the source had any.
#[derive(Debug, Clone, PartialEq)]
pub struct Weights {
    pub assets: Option<Vec<String>>,
    pub values: DVector<f64>,
}

pub fn parse_weights(text: &str) -> Result<Weights> {
    if text.trim_start().starts_with('{') {
        let value: Value = serde_json::from_str(text).map_err(|e| {
            Error::parse(e.line(), e.column(), format!("invalid weights JSON: {e}"))
        })?;
        let Value::Object(map) = value else {
            return Err(Error::parse(1, 1, "weights JSON must be an object"));
        };
        let mut assets = Vec::with_capacity(map.len());
        let mut values = Vec::with_capacity(map.len());
        for (name, v) in map {
            let x = v.as_f64().ok_or_else(|| {
                Error::parse(1, 1, format!("weight for {name:?} is not a number"))
            })?;
            assets.push(name);
            values.push(x);
        }
        return Ok(Weights {
            assets: Some(assets),
            values: DVector::from_vec(values),
        });
    }
    let mut values = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("");
        for (c, tok) in split_cells(content).enumerate() {
            values.push(parse_f64(tok, idx + 1, c + 1)?);
        }
    }
    if values.is_empty() {
        return Err(Error::parse(1, 1, "no weights"));
    }
    Ok(Weights {
        assets: None,
        values: DVector::from_vec(values),
    })
}

pub fn read_weights(path: &Path) -> Result<Weights> {
    parse_weights(&read_to_string(path)?)
}

pub fn format_weights(assets: &[String], w: &DVector<f64>) -> String {
    let map: Map<String, Value> = assets
        .iter()
        .zip(w.iter())
        .map(|(name, v)| (name.clone(), Value::from(*v)))
        .collect();
    let mut out = serde_json::to_string_pretty(&Value::Object(map)).expect("finite weights");
    out.push('\n');
    out
}

pub fn write_weights(path: &Path, assets: &[String], w: &DVector<f64>) -> Result<()> {
    write_atomic(path, &format_weights(assets, w))
}

pub fn format_matrix(m: &DMatrix<f64>) -> String {
    let mut out = String::new();
    for row in m.row_iter() {
        let cells: Vec<String> = row.iter().map(|v| super::fmt_f64(*v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_json_round_trip() {
        let names = vec!["b".to_string(), "a".to_string()];
        let w = DVector::from_vec(vec![0.1 + 0.2, -1.0 / 3.0]);
        let back = parse_weights(&format_weights(&names, &w)).unwrap();
        assert_eq!(back.assets.unwrap(), names);
        assert_eq!(back.values, w);
    }

    #[test]
    fn weights_json_is_bit_exact() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
        let w = DVector::from_fn(200, |_, _| rng.random_range(-0.05..0.05));
        let names = crate::moments::default_labels(200);
        let back = parse_weights(&format_weights(&names, &w)).unwrap();
        for (a, b) in back.values.iter().zip(w.iter()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn plain_weights_and_matrix() {
        let w = parse_weights("1, 2\n3\n").unwrap();
        assert_eq!(w.values.as_slice(), &[1.0, 2.0, 3.0]);
        let m = parse_matrix("1 2\n3,4 # trailing\n\n").unwrap();
        assert_eq!(m, DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]));
        assert!(matches!(parse_matrix("1 2\n3\n"), Err(Error::Dimension(_))));
        assert!(matches!(
            parse_matrix("1 x\n"),
            Err(Error::Parse {
                line: 1,
                column: 2,
                ..
            })
        ));
    }
}
