//! Plain-text moments file.
//!
//! ```text
//! # sparse-mvs moments
//! n = 2
//! assets = a,b
//! [mu]
//! <n values>
//! [sigma]
//! <n rows of n values>
//! [phi]
//! # block 0
//! <n rows of n values>
//! # block 1
//! ...
//! ```
//!
//! `phi` is written as `n` blocks of `n × n`: row `j`, column `k` of block `i`
//! holds `Φ[i, j·n + k]`. Lines starting with `#` are comments.

use std::path::Path;

use nalgebra::{DMatrix, DVector};

use super::{fmt_f64, parse_f64, read_to_string, write_atomic};
use crate::error::{Error, Result};
use crate::moments::{default_labels, MomentSet};

#[derive(Debug, Clone, PartialEq)]
pub struct MomentsFile {
    pub moments: MomentSet,
    pub assets: Vec<String>,
}

pub fn format_moments(moments: &MomentSet, assets: &[String]) -> String {
    let n = moments.n();
    let row = |vals: &mut dyn Iterator<Item = f64>| -> String {
        vals.map(fmt_f64).collect::<Vec<_>>().join(" ")
    };
    let mut out = String::new();
    out.push_str("# sparse-mvs moments\n");
    out.push_str("# phi: n blocks of n x n; block i, row j, column k holds Phi[i, j*n + k]\n");
    out.push_str(&format!("n = {n}\n"));
    out.push_str(&format!("assets = {}\n", assets.join(",")));
    out.push_str("[mu]\n");
    out.push_str(&row(&mut moments.mu().iter().copied()));
    out.push('\n');
    out.push_str("[sigma]\n");
    for i in 0..n {
        out.push_str(&row(&mut moments.sigma().row(i).iter().copied()));
        out.push('\n');
    }
    out.push_str("[phi]\n");
    let phi = moments.phi();
    for i in 0..n {
        out.push_str(&format!("# block {i}\n"));
        for j in 0..n {
            out.push_str(&row(&mut (0..n).map(|k| phi.get(i, j, k))));
            out.push('\n');
        }
    }
    out
}

pub fn write_moments(path: &Path, moments: &MomentSet, assets: &[String]) -> Result<()> {
    write_atomic(path, &format_moments(moments, assets))
}

pub fn read_moments(path: &Path) -> Result<MomentsFile> {
    parse_moments(&read_to_string(path)?)
}

pub fn parse_moments(text: &str) -> Result<MomentsFile> {
    let mut cur = Cursor {
        lines: text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
            .collect(),
        pos: 0,
    };

    let (line, n_line) = cur.next("n = <count>")?;
    let n: usize = key_value(n_line, "n", line)?
        .parse()
        .map_err(|_| Error::parse(line, 1, "asset count is not an integer"))?;
    if n == 0 {
        return Err(Error::parse(line, 1, "asset count must be positive"));
    }

    let (line, assets_line) = cur.next("assets = ...")?;
    let assets_value = key_value(assets_line, "assets", line)?;
    let assets: Vec<String> = if assets_value.is_empty() {
        default_labels(n)
    } else {
        assets_value
            .split(',')
            .map(|s| s.trim().to_string())
            .collect()
    };
    if assets.len() != n {
        return Err(Error::dim(format!(
            "{} asset names for n = {n}",
            assets.len()
        )));
    }

    cur.section("[mu]")?;
    let mu = DVector::from_vec(cur.row("mu", n)?);

    cur.section("[sigma]")?;
    let mut sigma = DMatrix::zeros(n, n);
    for i in 0..n {
        for (j, v) in cur.row("sigma row", n)?.into_iter().enumerate() {
            sigma[(i, j)] = v;
        }
    }

    cur.section("[phi]")?;
    let mut phi = DMatrix::zeros(n, n * n);
    for i in 0..n {
        for j in 0..n {
            for (k, v) in cur.row("phi row", n)?.into_iter().enumerate() {
                phi[(i, j * n + k)] = v;
            }
        }
    }

    Ok(MomentsFile {
        moments: MomentSet::new(mu, sigma, phi)?,
        assets,
    })
}

struct Cursor<'a> {
    lines: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn next(&mut self, what: &str) -> Result<(usize, &'a str)> {
        let item = self.lines.get(self.pos).copied().ok_or_else(|| {
            let line = self.lines.last().map_or(0, |l| l.0);
            Error::parse(line, 1, format!("unexpected end of file, expected {what}"))
        })?;
        self.pos += 1;
        Ok(item)
    }

    fn section(&mut self, name: &str) -> Result<()> {
        let (line, text) = self.next(name)?;
        if text != name {
            return Err(Error::parse(
                line,
                1,
                format!("expected section {name}, found {text:?}"),
            ));
        }
        Ok(())
    }

    fn row(&mut self, what: &str, n: usize) -> Result<Vec<f64>> {
        let (line, text) = self.next(what)?;
        let vals = text
            .split_whitespace()
            .enumerate()
            .map(|(c, tok)| parse_f64(tok, line, c + 1))
            .collect::<Result<Vec<f64>>>()?;
        if vals.len() != n {
            return Err(Error::dim(format!(
                "line {line}: {} values in {what}, expected {n}",
                vals.len()
            )));
        }
        Ok(vals)
    }
}

fn key_value<'a>(line_text: &'a str, key: &str, line: usize) -> Result<&'a str> {
    match line_text.split_once('=') {
        Some((k, v)) if k.trim() == key => Ok(v.trim()),
        _ => Err(Error::parse(line, 1, format!("expected `{key} = ...`"))),
    }
}
