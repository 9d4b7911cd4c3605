//! Plain-text polynomial files.
//!
//! One term per line, `coeff e1 e2` in two variables or `coeff e1 e2 e3` in
//! three. `#` starts a comment. Preset files may add a `point x y [z]` line
//! naming a base point inside the cavity.

use std::fmt::Write as _;

use super::Polynomial;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct PresetFile {
    pub p: Polynomial,
    pub point: Option<Vec<f64>>,
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

pub fn parse_preset(text: &str) -> Result<PresetFile> {
    let mut dim: Option<usize> = None;
    let mut terms = Vec::new();
    let mut point = None;
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields[0] == "point" {
            if point.is_some() {
                return Err(parse_err(lineno, "duplicate point line"));
            }
            let coords = fields[1..]
                .iter()
                .map(|s| {
                    s.parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| parse_err(lineno, format!("bad coordinate '{s}'")))
                })
                .collect::<Result<Vec<f64>>>()?;
            point = Some((lineno, coords));
            continue;
        }
        let d = fields.len() - 1;
        if d != 2 && d != 3 {
            return Err(parse_err(
                lineno,
                format!("expected 'coeff e1 e2 [e3]', found {} fields", fields.len()),
            ));
        }
        match dim {
            None => dim = Some(d),
            Some(prev) if prev != d => {
                return Err(parse_err(
                    lineno,
                    format!("term has {d} exponents, earlier terms have {prev}"),
                ))
            }
            _ => {}
        }
        let coeff: f64 = fields[0]
            .parse()
            .ok()
            .filter(|c: &f64| c.is_finite())
            .ok_or_else(|| parse_err(lineno, format!("bad coefficient '{}'", fields[0])))?;
        let mut exps = [0u32; 3];
        for (i, s) in fields[1..].iter().enumerate() {
            exps[i] = s
                .parse()
                .map_err(|_| parse_err(lineno, format!("bad exponent '{s}'")))?;
        }
        terms.push((exps, coeff));
    }
    let dim = dim.ok_or(Error::ZeroPolynomial)?;
    let p = Polynomial::new(dim, terms)?;
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let point = match point {
        Some((lineno, c)) if c.len() != dim => {
            return Err(parse_err(
                lineno,
                format!("point has {} coordinates, polynomial has {dim} variables", c.len()),
            ))
        }
        Some((_, c)) => Some(c),
        None => None,
    };
    Ok(PresetFile { p, point })
}

pub fn parse_polynomial(text: &str) -> Result<Polynomial> {
    Ok(parse_preset(text)?.p)
}

/// Writes the text form. Coefficients use the shortest representation that
/// parses back to the same `f64`.
pub fn format_polynomial(p: &Polynomial, point: Option<&[f64]>) -> String {
    let mut out = String::new();
    for t in p.terms() {
        let _ = write!(out, "{}", t.coeff);
        for e in &t.exps[..p.dim()] {
            let _ = write!(out, " {e}");
        }
        out.push('\n');
    }
    if let Some(a) = point {
        out.push_str("point");
        for v in a {
            let _ = write!(out, " {v}");
        }
        out.push('\n');
    }
    out
}
