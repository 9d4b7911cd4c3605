//! Resolution and validation of the inputs shared by the subcommands.

use std::path::Path;

use cavity::geometry::{extract_ovals, segment_clear};
use cavity::levitation::distance_to_zero_set;
use cavity::poly::{parse_polynomial, parse_preset};
use cavity::separator::euler_separator;
use cavity::{presets, GridSpec, Polynomial, QuadratureRule};

use crate::args::{Geometry, GridArgs};
use crate::error::{invalid, CliResult};

pub struct Setup {
    pub p: Polynomial,
    pub a: Vec<f64>,
    pub rule: QuadratureRule,
    /// Separator shipped with a preset.
    pub shipped_q: Option<Polynomial>,
}

impl Setup {
    pub fn dim(&self) -> usize {
        self.p.dim()
    }
}

fn finite(v: &[f64], what: &str) -> CliResult<()> {
    if v.iter().any(|x| !x.is_finite()) {
        return invalid(format!("{what} has non-finite coordinates"));
    }
    Ok(())
}

pub fn load(g: &Geometry) -> CliResult<Setup> {
    let (p, file_point, shipped_q) = if Path::new(&g.poly).is_file() {
        let f = parse_preset(&std::fs::read_to_string(&g.poly)?)?;
        (f.p, f.point, None)
    } else if let Some(pr) = presets::by_name(&g.poly) {
        (pr.p, Some(pr.point), pr.q)
    } else {
        return invalid(format!("--poly {}: no such file or preset", g.poly));
    };
    let dim = p.dim();
    if dim != 2 && dim != 3 {
        return invalid(format!("--poly: dimension {dim} is not supported"));
    }
    let a = g.point.clone().or(file_point).unwrap_or_else(|| vec![0.0; dim]);
    if a.len() != dim {
        return invalid(format!("--point has {} coordinates, the polynomial has {dim}", a.len()));
    }
    finite(&a, "--point")?;
    let n = g.directions.unwrap_or(if dim == 2 { 180 } else { 362 });
    if n < 2 {
        return invalid("--directions must be at least 2");
    }
    let rule = QuadratureRule::with_directions(dim, n)?;
    Ok(Setup {
        p,
        a,
        rule,
        shipped_q,
    })
}

pub fn parse_point(s: &str, dim: usize) -> CliResult<Vec<f64>> {
    let v: Result<Vec<f64>, _> = s.split(',').map(|t| t.trim().parse::<f64>()).collect();
    match v {
        Ok(v) if v.len() == dim && v.iter().all(|x| x.is_finite()) => Ok(v),
        _ => invalid(format!("bad point '{s}' (need {dim} comma-separated numbers)")),
    }
}

pub enum Weight {
    Poly(Polynomial),
    Uniform,
}

/// `--q`: a file, a preset name (its shipped separator), a constant,
/// `euler`, or (when allowed) `uniform`.
pub fn load_q(spec: &str, s: &Setup, allow_uniform: bool) -> CliResult<Weight> {
    let dim = s.dim();
    let q = match spec {
        "euler" => euler_separator(&s.p, &s.a)?,
        "uniform" if allow_uniform => return Ok(Weight::Uniform),
        "shipped" => match &s.shipped_q {
            Some(q) => q.clone(),
            None => return invalid("--q shipped: the geometry has no shipped separator"),
        },
        _ => {
            if let Ok(c) = spec.parse::<f64>() {
                if !c.is_finite() {
                    return invalid("--q must be finite");
                }
                Polynomial::constant(dim, c)?
            } else if Path::new(spec).is_file() {
                parse_polynomial(&std::fs::read_to_string(spec)?)?
            } else if let Some(q) = presets::by_name(spec).and_then(|p| p.q) {
                q
            } else {
                return invalid(format!("--q {spec}: not a file, constant, preset separator or keyword"));
            }
        }
    };
    if q.dim() != dim {
        return invalid(format!("--q has dimension {}, the polynomial has {dim}", q.dim()));
    }
    Ok(Weight::Poly(q))
}

/// Largest distance from `a` to the innermost oval, and to any point of
/// the zero set met by the sampled lines.
pub fn extents(s: &Setup) -> CliResult<(f64, f64)> {
    let ov = extract_ovals(&s.p, &s.a, &s.rule)?;
    let dist = |x: &Vec<f64>| x.iter().zip(&s.a).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt();
    let inner = ov.clouds.first().map_or(0.0, |c| c.iter().map(dist).fold(0.0, f64::max));
    let outer = ov.clouds.iter().flatten().map(dist).fold(0.0, f64::max);
    if !(inner > 0.0 && inner.is_finite()) {
        return invalid("cannot size the cavity from the zero set; give --lo and --hi");
    }
    Ok((inner, outer))
}

pub fn grid_spec(g: &GridArgs, s: &Setup) -> CliResult<GridSpec> {
    let dim = s.dim();
    if g.grid < 2 {
        return invalid("--grid must be at least 2");
    }
    if dim == 3 && g.grid > 256 {
        return invalid("--grid above 256 is too large for a 3D grid");
    }
    let (lo, hi) = match (&g.lo, &g.hi) {
        (Some(lo), Some(hi)) => (lo.clone(), hi.clone()),
        (None, None) => {
            let (r, _) = extents(s)?;
            let h = 1.05 * r;
            (s.a.iter().map(|v| v - h).collect(), s.a.iter().map(|v| v + h).collect())
        }
        _ => return invalid("--lo and --hi must be given together"),
    };
    if lo.len() != dim || hi.len() != dim {
        return invalid(format!("--lo/--hi need {dim} coordinates"));
    }
    finite(&lo, "--lo")?;
    finite(&hi, "--hi")?;
    if lo.iter().zip(&hi).any(|(l, h)| l >= h) {
        return invalid("--lo must be below --hi on every axis");
    }
    Ok(GridSpec::new(&lo, &hi, &vec![g.grid; dim])?)
}

/// Explicit probes, or `count` cavity points from a Halton sequence in a
/// box of half the cavity radius around the base point, kept at least
/// 0.3 times the radius away from the zero set. Near the zero set the
/// field integrand is sharply peaked and needs many more directions.
pub fn probes(list: &[String], count: usize, s: &Setup, keep: impl Fn(&[f64]) -> bool) -> CliResult<Vec<Vec<f64>>> {
    let dim = s.dim();
    if !list.is_empty() {
        return list.iter().map(|t| parse_point(t, dim)).collect();
    }
    if count == 0 || count > 10_000 {
        return invalid("--count must be between 1 and 10000");
    }
    let (r, _) = extents(s)?;
    let margin = 0.3 * r;
    let bases = [2u64, 3, 5];
    let mut out = Vec::new();
    let mut i = 1u64;
    while out.len() < count {
        if i > 200_000 {
            return invalid("could not place probes in the cavity; give --probe explicitly");
        }
        let x: Vec<f64> = (0..dim)
            .map(|k| s.a[k] + 0.5 * r * (2.0 * halton(i, bases[k]) - 1.0))
            .collect();
        i += 1;
        if segment_clear(&s.p, &s.a, &x) && keep(&x) && distance_to_zero_set(&s.p, &x)? > margin {
            out.push(x);
        }
    }
    Ok(out)
}

fn halton(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}
