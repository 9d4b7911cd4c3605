//! Phantoms and their spherical integrals over centres on the zero set.
//!
//! The sinogram samples radii uniformly in `sigma = r^2`.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{segment_clear, RaySet};
use crate::poly::Polynomial;
use crate::quadrature::{integrate_adaptive, QuadratureRule};

#[derive(Clone, Debug, PartialEq)]
pub enum Component {
    /// `amplitude * exp(-|x - c|^2 / (2 width^2))`
    Gaussian {
        center: Vec<f64>,
        width: f64,
        amplitude: f64,
    },
    /// Indicator of a ball. With `taper > 0` the edge is a cosine ramp from 1
    /// at `radius - taper` to 0 at `radius + taper`.
    Ball {
        center: Vec<f64>,
        radius: f64,
        amplitude: f64,
        taper: f64,
    },
}

impl Component {
    pub fn center(&self) -> &[f64] {
        match self {
            Component::Gaussian { center, .. } | Component::Ball { center, .. } => center,
        }
    }

    /// Radius outside which the component is treated as zero (4 widths for
    /// a Gaussian).
    pub fn support_radius(&self) -> f64 {
        match self {
            Component::Gaussian { width, .. } => 4.0 * width,
            Component::Ball { radius, taper, .. } => radius + taper,
        }
    }

    fn radial(&self, rho: f64) -> f64 {
        match self {
            Component::Gaussian {
                width, amplitude, ..
            } => amplitude * (-rho * rho / (2.0 * width * width)).exp(),
            Component::Ball {
                radius,
                amplitude,
                taper,
                ..
            } => amplitude * ball_profile(rho, *radius, *taper),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.radial(dist(x, self.center()))
    }
}

fn ball_profile(rho: f64, radius: f64, taper: f64) -> f64 {
    if taper <= 0.0 {
        return if rho < radius { 1.0 } else { 0.0 };
    }
    if rho <= radius - taper {
        1.0
    } else if rho >= radius + taper {
        0.0
    } else {
        0.5 * (1.0 + (PI * (rho - radius + taper) / (2.0 * taper)).cos())
    }
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(u, v)| (u - v) * (u - v))
        .sum::<f64>()
        .sqrt()
}

/// A sum of Gaussian bumps and balls.
#[derive(Clone, Debug, PartialEq)]
pub struct Phantom {
    pub dim: usize,
    pub components: Vec<Component>,
}

impl Phantom {
    pub fn new(dim: usize, components: Vec<Component>) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::UnsupportedDimension(dim));
        }
        for c in &components {
            if c.center().len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: c.center().len(),
                });
            }
            let ok = match c {
                Component::Gaussian {
                    width, amplitude, ..
                } => *width > 0.0 && amplitude.is_finite(),
                Component::Ball {
                    radius,
                    amplitude,
                    taper,
                    ..
                } => *radius > 0.0 && *taper >= 0.0 && taper < radius && amplitude.is_finite(),
            };
            if !ok || c.center().iter().any(|v| !v.is_finite()) {
                return Err(Error::input("forward", format!("invalid phantom component {c:?}")));
            }
        }
        Ok(Phantom { dim, components })
    }

    pub fn zero(dim: usize) -> Result<Self> {
        Self::new(dim, Vec::new())
    }

    pub fn gaussian(center: &[f64], width: f64, amplitude: f64) -> Result<Self> {
        Self::new(
            center.len(),
            vec![Component::Gaussian {
                center: center.to_vec(),
                width,
                amplitude,
            }],
        )
    }

    pub fn ball(center: &[f64], radius: f64, amplitude: f64, taper: f64) -> Result<Self> {
        Self::new(
            center.len(),
            vec![Component::Ball {
                center: center.to_vec(),
                radius,
                amplitude,
                taper,
            }],
        )
    }

    /// Parses `gauss <c> <width> <amp>` and `ball <c> <radius> <amp> [taper]`
    /// components separated by `;`, with `<c>` a comma-separated point.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = |m: String| Error::input("forward", m);
        let mut comps = Vec::new();
        let mut dim = None;
        for part in text.split(';') {
            let f: Vec<&str> = part.split_whitespace().collect();
            if f.is_empty() {
                continue;
            }
            let num = |s: &str| {
                s.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| bad(format!("bad number '{s}' in phantom")))
            };
            if f.len() < 2 {
                return Err(bad(format!("incomplete phantom component '{}'", part.trim())));
            }
            let center = f[1].split(',').map(num).collect::<Result<Vec<f64>>>()?;
            if *dim.get_or_insert(center.len()) != center.len() {
                return Err(bad("phantom components disagree in dimension".into()));
            }
            let c = match (f[0], f.len()) {
                ("gauss", 4) => Component::Gaussian {
                    center,
                    width: num(f[2])?,
                    amplitude: num(f[3])?,
                },
                ("ball", 4 | 5) => Component::Ball {
                    center,
                    radius: num(f[2])?,
                    amplitude: num(f[3])?,
                    taper: if f.len() == 5 { num(f[4])? } else { 0.0 },
                },
                _ => {
                    return Err(bad(format!(
                        "phantom component '{}' is not 'gauss C W A' or 'ball C R A [T]'",
                        part.trim()
                    )))
                }
            };
            comps.push(c);
        }
        let dim = dim.ok_or_else(|| bad("empty phantom".into()))?;
        Self::new(dim, comps)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.components.iter().map(|c| c.eval(x)).sum()
    }

    /// Largest distance from `x` to a point of the effective support.
    pub fn reach_from(&self, x: &[f64]) -> f64 {
        self.components
            .iter()
            .map(|c| dist(x, c.center()) + c.support_radius())
            .fold(0.0, f64::max)
    }

    /// Checks that the effective support lies in the cavity containing `a`,
    /// by testing boundary samples of every component for a clear segment
    /// to `a`.
    pub fn check_support(&self, p: &Polynomial, a: &[f64]) -> Result<()> {
        let dirs: Vec<Vec<f64>> = if self.dim == 2 {
            (0..64)
                .map(|k| {
                    let th = k as f64 * PI / 32.0;
                    vec![th.cos(), th.sin()]
                })
                .collect()
        } else {
            let rule = QuadratureRule::hemisphere(8, 16)?;
            (0..rule.len())
                .flat_map(|j| {
                    let w = rule.node(j).to_vec();
                    let m: Vec<f64> = w.iter().map(|v| -v).collect();
                    [w, m]
                })
                .collect()
        };
        for c in &self.components {
            let rho = c.support_radius();
            let mut pts = vec![c.center().to_vec()];
            for d in &dirs {
                pts.push(c.center().iter().zip(d).map(|(x, v)| x + rho * v).collect());
            }
            if let Some(bad) = pts.iter().find(|x| !segment_clear(p, a, x)) {
                return Err(Error::precondition(
                    "forward",
                    format!("phantom support reaches {bad:?}, outside the cavity"),
                ));
            }
        }
        Ok(())
    }
}

/// Surface integral of one component over the sphere of radius `r` about
/// `xi`.
fn component_sphere_integral(c: &Component, xi: &[f64], r: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    let n = xi.len();
    let d = dist(xi, c.center());
    match c {
        Component::Gaussian {
            width, amplitude, ..
        } => {
            let s2 = width * width;
            let base = -(d - r) * (d - r) / (2.0 * s2);
            if base < -745.0 {
                return 0.0;
            }
            if n == 3 {
                if d * r < 1e-8 * s2 {
                    let full = -(d * d + r * r) / (2.0 * s2);
                    return amplitude * 4.0 * PI * r * r * full.exp();
                }
                // 2 pi r s^2/d (e^{-(d-r)^2/2s^2} - e^{-(d+r)^2/2s^2})
                amplitude * 2.0 * PI * r * s2 / d * base.exp() * -(-2.0 * d * r / s2).exp_m1()
            } else {
                let kappa = d * r / s2;
                let f = |th: f64| {
                    let h = (0.5 * th).sin();
                    (base - 2.0 * kappa * h * h).exp()
                };
                let (v, _) = integrate_adaptive(f, 0.0, PI, 1e-15, 1e-13, 4000);
                amplitude * 2.0 * r * v
            }
        }
        Component::Ball {
            radius,
            amplitude,
            taper,
            ..
        } => {
            if *taper <= 0.0 {
                amplitude * sharp_ball_sphere(n, d, r, *radius)
            } else {
                amplitude * tapered_ball_sphere(n, d, r, *radius, *taper)
            }
        }
    }
}

/// Measure of the part of the sphere `|y - xi| = r` inside a ball of radius
/// `big` whose centre is at distance `d` from `xi`.
pub fn sharp_ball_sphere(n: usize, d: f64, r: f64, big: f64) -> f64 {
    let full = if n == 2 { 2.0 * PI * r } else { 4.0 * PI * r * r };
    if d + r <= big {
        return full;
    }
    if r >= d + big || d >= r + big {
        return 0.0;
    }
    let c = ((r * r + d * d - big * big) / (2.0 * r * d)).clamp(-1.0, 1.0);
    if n == 2 {
        2.0 * r * c.acos()
    } else {
        2.0 * PI * r * r * (1.0 - c)
    }
}

fn tapered_ball_sphere(n: usize, d: f64, r: f64, big: f64, taper: f64) -> f64 {
    if d < 1e-14 {
        let full = if n == 2 { 2.0 * PI * r } else { 4.0 * PI * r * r };
        return full * ball_profile(r, big, taper);
    }
    if n == 3 {
        // dS = 2 pi r / d * rho d rho over rho in [|r - d|, r + d]
        let lo = (r - d).abs();
        let hi = r + d;
        let mut v = 0.0;
        let cuts = [lo, big - taper, big + taper, hi];
        let mut pts: Vec<f64> = cuts.iter().copied().filter(|&x| x >= lo && x <= hi).collect();
        pts.sort_by(f64::total_cmp);
        for w in pts.windows(2) {
            let (s, _) = integrate_adaptive(
                |rho| rho * ball_profile(rho, big, taper),
                w[0],
                w[1],
                1e-15,
                1e-13,
                2000,
            );
            v += s;
        }
        2.0 * PI * r / d * v
    } else {
        let angle = |rho: f64| {
            ((r * r + d * d - rho * rho) / (2.0 * r * d))
                .clamp(-1.0, 1.0)
                .acos()
        };
        let mut pts = vec![0.0, PI, angle(big - taper), angle(big + taper)];
        pts.sort_by(f64::total_cmp);
        let f = |th: f64| {
            let h = (0.5 * th).sin();
            let rho = ((d - r) * (d - r) + 4.0 * d * r * h * h).sqrt();
            ball_profile(rho, big, taper)
        };
        let mut v = 0.0;
        for w in pts.windows(2) {
            v += integrate_adaptive(f, w[0], w[1], 1e-15, 1e-13, 2000).0;
        }
        2.0 * r * v
    }
}

/// `∫_{|y - xi| = r} f dS`, the surface integral (not the mean).
pub fn sphere_integral(f: &Phantom, xi: &[f64], r: f64) -> Result<f64> {
    if xi.len() != f.dim {
        return Err(Error::DimensionMismatch {
            expected: f.dim,
            got: xi.len(),
        });
    }
    if !(r >= 0.0) {
        return Err(Error::input("forward", format!("negative radius {r}")));
    }
    Ok(f.components
        .iter()
        .map(|c| component_sphere_integral(c, xi, r))
        .sum())
}

/// One centre on the zero set with its sampled column.
#[derive(Clone, Debug, PartialEq)]
pub struct Center {
    /// Index of the direction in the quadrature rule.
    pub j: usize,
    /// Root branch, `±1 ... ±mu`.
    pub k: i32,
    pub omega: Vec<f64>,
    pub t: f64,
    pub point: Vec<f64>,
    /// Quadrature weight of the direction (after renormalization).
    pub rule_weight: f64,
    /// `sgn(t) |t|^{n-1} / p_t'`
    pub leray: f64,
    pub values: Vec<f64>,
}

impl Center {
    /// Combined weight of this centre in an integral over the zero set.
    pub fn weight(&self) -> f64 {
        self.rule_weight * self.leray
    }
}

/// Spherical integrals sampled at `sigma_i = i d_sigma`, `i = 0..=n_sigma`.
#[derive(Clone, Debug, PartialEq)]
pub struct Sinogram {
    pub dim: usize,
    pub degree: usize,
    pub mu: usize,
    pub base: Vec<f64>,
    pub directions: usize,
    pub n_sigma: usize,
    pub d_sigma: f64,
    pub centers: Vec<Center>,
}

impl Sinogram {
    pub fn sigma_max(&self) -> f64 {
        self.n_sigma as f64 * self.d_sigma
    }

    pub fn sigma(&self, i: usize) -> f64 {
        i as f64 * self.d_sigma
    }

    /// The same geometry with every column replaced by `f(column)`.
    pub fn map_columns<F>(&self, f: F) -> Sinogram
    where
        F: Fn(&[f64]) -> Vec<f64> + Sync,
    {
        let mut out = self.clone();
        out.centers
            .par_iter_mut()
            .for_each(|c| c.values = f(&c.values));
        out.n_sigma = out.centers.first().map_or(self.n_sigma, |c| c.values.len() - 1);
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_columns(path, "sinogram", self)
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let (tag, s) = read_columns(path)?;
        if tag != "sinogram" {
            return Err(Error::input("forward", format!("{} is a {tag} file", path.display())));
        }
        Ok(s)
    }
}

pub(crate) fn write_columns(path: &Path, tag: &str, s: &Sinogram) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    writeln!(
        w,
        "# {tag} n={} m={} mu={} n_sigma={} d_sigma={:e} directions={}",
        s.dim, s.degree, s.mu, s.n_sigma, s.d_sigma, s.directions
    )?;
    let mut line = String::from("# base");
    for v in &s.base {
        let _ = write!(line, " {v:e}");
    }
    writeln!(w, "{line}")?;
    let mut weights = vec![0.0; s.directions];
    for c in &s.centers {
        weights[c.j] = c.rule_weight;
    }
    line = String::from("# weights");
    for v in &weights {
        let _ = write!(line, " {v:e}");
    }
    writeln!(w, "{line}")?;
    for c in &s.centers {
        line.clear();
        let _ = write!(line, "{},{}", c.j, c.k);
        for v in &c.omega {
            let _ = write!(line, ",{v:e}");
        }
        let _ = write!(line, ",{:e},{:e}", c.t, c.leray);
        for v in &c.values {
            let _ = write!(line, ",{v:e}");
        }
        writeln!(w, "{line}")?;
    }
    w.flush()?;
    Ok(())
}

pub(crate) fn read_columns(path: &Path) -> Result<(String, Sinogram)> {
    let text = fs::read_to_string(path)?;
    let bad = |m: &str| Error::input("forward", format!("{}: {m}", path.display()));
    let mut lines = text.lines();
    let head = lines.next().ok_or_else(|| bad("empty file"))?;
    let mut fields = head.trim_start_matches('#').split_whitespace();
    let tag = fields.next().ok_or_else(|| bad("missing tag"))?.to_string();
    let mut kv = std::collections::HashMap::new();
    for f in fields {
        if let Some((k, v)) = f.split_once('=') {
            kv.insert(k.to_string(), v.to_string());
        }
    }
    let get = |k: &str| kv.get(k).ok_or_else(|| bad(&format!("missing header field {k}")));
    let us = |k: &str| -> Result<usize> { get(k)?.parse().map_err(|_| bad(&format!("bad {k}"))) };
    let dim = us("n")?;
    if dim != 2 && dim != 3 {
        return Err(Error::UnsupportedDimension(dim));
    }
    let degree = us("m")?;
    let mu = us("mu")?;
    let n_sigma = us("n_sigma")?;
    let directions = us("directions")?;
    let d_sigma: f64 = get("d_sigma")?.parse().map_err(|_| bad("bad d_sigma"))?;
    let nums = |line: Option<&str>, key: &str| -> Result<Vec<f64>> {
        let l = line.ok_or_else(|| bad("truncated header"))?;
        let rest = l
            .trim_start_matches('#')
            .trim()
            .strip_prefix(key)
            .ok_or_else(|| bad(&format!("missing {key} line")))?;
        rest.split_whitespace()
            .map(|s| s.parse::<f64>().map_err(|_| bad("bad number")))
            .collect()
    };
    let base = nums(lines.next(), "base")?;
    let weights = nums(lines.next(), "weights")?;
    if base.len() != dim || weights.len() != directions {
        return Err(bad("header lines disagree with the dimensions"));
    }
    let mut centers = Vec::new();
    for (ln, l) in lines.enumerate() {
        if l.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = l.split(',').collect();
        if f.len() != 2 + dim + 2 + n_sigma + 1 {
            return Err(bad(&format!("row {} has {} fields", ln + 1, f.len())));
        }
        let j: usize = f[0].parse().map_err(|_| bad("bad direction index"))?;
        let k: i32 = f[1].parse().map_err(|_| bad("bad branch index"))?;
        let v: Vec<f64> = f[2..]
            .iter()
            .map(|s| s.parse::<f64>().map_err(|_| bad("bad number")))
            .collect::<Result<_>>()?;
        if j >= directions {
            return Err(bad("direction index out of range"));
        }
        let omega = v[..dim].to_vec();
        let t = v[dim];
        let point = base.iter().zip(&omega).map(|(a, w)| a + t * w).collect();
        centers.push(Center {
            j,
            k,
            omega,
            t,
            point,
            rule_weight: weights[j],
            leray: v[dim + 1],
            values: v[dim + 2..].to_vec(),
        });
    }
    Ok((
        tag,
        Sinogram {
            dim,
            degree,
            mu,
            base,
            directions,
            n_sigma,
            d_sigma,
            centers,
        },
    ))
}

/// `Δσ` such that `n_sigma` intervals reach `margin` times the largest
/// squared distance from a centre to the phantom support.
pub fn default_d_sigma(f: &Phantom, set: &RaySet, n_sigma: usize, margin: f64) -> f64 {
    let mut reach: f64 = 0.0;
    for pr in &set.profiles {
        for i in 0..pr.roots.len() {
            reach = reach.max(f.reach_from(&pr.point(i)));
        }
    }
    margin * reach * reach / n_sigma as f64
}

fn check_sigma_grid(d_sigma: f64, n_sigma: usize) -> Result<()> {
    if !(d_sigma > 0.0 && d_sigma.is_finite()) {
        return Err(Error::input("forward", format!("invalid sigma step {d_sigma}")));
    }
    if n_sigma == 0 {
        return Err(Error::input("forward", "sigma grid needs at least one interval"));
    }
    Ok(())
}

pub fn simulate_sinogram(
    f: &Phantom,
    p: &Polynomial,
    a: &[f64],
    rule: &QuadratureRule,
    d_sigma: f64,
    n_sigma: usize,
) -> Result<Sinogram> {
    if f.dim != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: f.dim,
        });
    }
    check_sigma_grid(d_sigma, n_sigma)?;
    let set = RaySet::build(p, a, rule)?;
    f.check_support(p, a)?;
    Ok(simulate_on(f, p, &set, rule.len(), d_sigma, n_sigma))
}

pub(crate) fn simulate_on(
    f: &Phantom,
    p: &Polynomial,
    set: &RaySet,
    directions: usize,
    d_sigma: f64,
    n_sigma: usize,
) -> Sinogram {
    let mut centers = Vec::with_capacity(set.center_count());
    for ((pr, w), &j) in set.profiles.iter().zip(&set.weights).zip(&set.indices) {
        for i in 0..pr.roots.len() {
            centers.push(Center {
                j,
                k: pr.label(i),
                omega: pr.direction.clone(),
                t: pr.roots[i],
                point: pr.point(i),
                rule_weight: *w,
                leray: pr.leray_weight(i),
                values: Vec::new(),
            });
        }
    }
    centers.par_iter_mut().for_each(|c| {
        c.values = (0..=n_sigma)
            .map(|i| {
                let r = (i as f64 * d_sigma).sqrt();
                f.components
                    .iter()
                    .map(|comp| component_sphere_integral(comp, &c.point, r))
                    .sum()
            })
            .collect();
    });
    Sinogram {
        dim: p.dim(),
        degree: p.degree(),
        mu: p.degree() / 2,
        base: set.base.clone(),
        directions,
        n_sigma,
        d_sigma,
        centers,
    }
}
