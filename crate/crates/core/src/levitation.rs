//! Gravitational fields of masses carried by oscillatory zero sets.
//!
//! The field of a density `ρ` is the attraction
//! `F(x) = ∫ ρ(y) (y - x)/|y - x|^n dy`, with the gravitational constant set
//! to one. In the plane the same kernel gives a force decaying like `1/r`
//! (logarithmic potential).
//!
//! Surface masses `|q| δ(p)` are integrated in polar coordinates about a
//! fixed anchor in the cavity, where the mass element of the root `t_k` in
//! direction `w` is `|t_k|^{n-1} |q/p_t'| dΩ`. Every quantity summed along a
//! ray is a symmetric function of all its roots, so the direction integrand
//! stays smooth even where individual sheets of the zero set touch.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{ray_roots, ray_roots_unchecked, RaySet, ROOT_TOL};
use crate::numeric::Accumulator;
use crate::poly::Polynomial;
use crate::quadrature::{gauss_legendre_on, QuadratureRule};
use crate::separator::{sign_normalize, verify_on};

/// Probes closer than this to the zero set are rejected.
pub const NEAR_SINGULAR: f64 = 1e-6;

#[derive(Clone, Debug)]
pub enum DensityKind {
    /// `|q| δ(p)`
    Surface { q: Polynomial },
    /// `|q| dx` on `lo <= p <= hi`
    Layer { q: Polynomial, lo: f64, hi: f64 },
    /// Unit mass per unit area (length in the plane) of the zero set.
    UniformSurface,
}

#[derive(Clone, Debug)]
pub struct MassDensitySpec {
    pub p: Polynomial,
    pub kind: DensityKind,
    /// Cavity point used as the origin of the polar parametrization.
    pub anchor: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FieldProbe {
    pub point: Vec<f64>,
    pub field: Vec<f64>,
    /// Difference between two dyadic quadrature levels.
    pub error_estimate: f64,
    pub mass: f64,
    /// Distance from the probe to the nearest carrier surface.
    pub distance: f64,
    /// `|F| / (M / d^{n-1})`
    pub normalized: f64,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `Σ_k q(a + t_k w) / p_t'(a + t_k w)` over all roots on the line.
pub fn ray_cancellation_sum(p: &Polynomial, q: &Polynomial, a: &[f64], w: &[f64]) -> Result<f64> {
    if q.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: q.dim(),
        });
    }
    let prof = ray_roots(p, a, w, ROOT_TOL)?;
    if let Some(d) = prof.degeneracy {
        return Err(Error::DegenerateDirection(format!("{d:?} along {w:?}")));
    }
    let mut acc = Accumulator::new();
    for (i, d) in prof.derivs.iter().enumerate() {
        acc.add(q.eval_unchecked(&prof.point(i)) / d);
    }
    Ok(acc.value())
}

/// Distance from `x` to the zero set of `p`: the nearest root along a dense
/// fan of lines through `x`, then a local golden-section search over the
/// direction around the best line of the fan.
pub fn distance_to_zero_set(p: &Polynomial, x: &[f64]) -> Result<f64> {
    if p.eval(x)? == 0.0 {
        return Ok(0.0);
    }
    let n = p.dim();
    let (rule, spacing) = match n {
        2 => (QuadratureRule::half_circle(1440)?, PI / 1440.0),
        _ => (QuadratureRule::hemisphere(48, 96)?, PI / 48.0),
    };
    let nearest = |w: &[f64]| {
        let pr = ray_roots_unchecked(p, x, w, ROOT_TOL);
        pr.roots.iter().fold(f64::INFINITY, |m, t| m.min(t.abs()))
    };
    let (best, j) = (0..rule.len())
        .into_par_iter()
        .map(|j| (nearest(rule.node(j)), j))
        .reduce(|| (f64::INFINITY, 0), |a, b| if b.0 < a.0 { b } else { a });
    if !best.is_finite() {
        return Ok(best);
    }
    let w0 = rule.node(j).to_vec();
    let basis = tangent_basis(&w0);
    let along = |c: &[f64]| {
        let mut w = w0.clone();
        for (ci, b) in c.iter().zip(&basis) {
            for k in 0..n {
                w[k] += ci * b[k];
            }
        }
        let wn = norm(&w);
        nearest(&w.iter().map(|v| v / wn).collect::<Vec<_>>())
    };
    let mut c = vec![0.0; n - 1];
    let mut h = 2.0 * spacing;
    let mut d = best;
    for _ in 0..if n == 2 { 1 } else { 6 } {
        for i in 0..n - 1 {
            let mut at = |v: f64| {
                let mut ci = c.clone();
                ci[i] = v;
                along(&ci)
            };
            let (v, fv) = golden_min(&mut at, c[i] - h, c[i] + h, 60);
            if fv < d {
                d = fv;
                c[i] = v;
            }
        }
        h *= 0.5;
    }
    Ok(d)
}

fn tangent_basis(w: &[f64]) -> Vec<Vec<f64>> {
    if w.len() == 2 {
        return vec![vec![-w[1], w[0]]];
    }
    let t = if w[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let dot: f64 = t.iter().zip(w).map(|(a, b)| a * b).sum();
    let u: Vec<f64> = (0..3).map(|k| t[k] - dot * w[k]).collect();
    let un = norm(&u);
    let u: Vec<f64> = u.iter().map(|v| v / un).collect();
    let v = vec![
        w[1] * u[2] - w[2] * u[1],
        w[2] * u[0] - w[0] * u[2],
        w[0] * u[1] - w[1] * u[0],
    ];
    vec![u, v]
}

fn golden_min(f: &mut impl FnMut(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Field and mass of one surface `p = 0` with weight `mass(y, t, p_t')`.
fn surface_sum<M>(set: &RaySet, x: &[f64], mass: &M) -> (Vec<f64>, f64)
where
    M: Fn(&[f64], f64, f64) -> f64 + Sync,
{
    let n = set.dim;
    let parts: Vec<(Vec<f64>, f64)> = set
        .profiles
        .par_iter()
        .zip(&set.weights)
        .map(|(pr, w)| {
            let mut f = vec![0.0; n];
            let mut m = 0.0;
            for i in 0..pr.roots.len() {
                let y = pr.point(i);
                let dm = w * mass(&y, pr.roots[i], pr.derivs[i]);
                let d: Vec<f64> = y.iter().zip(x).map(|(a, b)| a - b).collect();
                let r = norm(&d);
                let k = dm / r.powi(n as i32);
                for c in 0..n {
                    f[c] += k * d[c];
                }
                m += dm;
            }
            (f, m)
        })
        .collect();
    let mut acc = vec![Accumulator::new(); n];
    let mut macc = Accumulator::new();
    for (f, m) in parts {
        for c in 0..n {
            acc[c].add(f[c]);
        }
        macc.add(m);
    }
    (acc.iter().map(|a| a.value()).collect(), macc.value())
}

fn surface_mass_fn<'a>(
    p: &'a Polynomial,
    q: Option<&'a Polynomial>,
) -> impl Fn(&[f64], f64, f64) -> f64 + Sync + 'a {
    let n = p.dim() as i32;
    move |y: &[f64], t: f64, dp: f64| {
        let jac = t.abs().powi(n - 1) / dp.abs();
        match q {
            Some(q) => jac * q.eval_unchecked(y).abs(),
            None => jac * norm(&p.gradient_unchecked(y)),
        }
    }
}

/// Checks that `q` keeps one sign on each oval of the sampled carrier.
fn check_q_on_carrier(q: &Polynomial, set: &RaySet) -> Result<()> {
    let scale = q.max_abs_coeff();
    let mut signs: std::collections::BTreeMap<usize, (usize, usize)> = Default::default();
    for pr in &set.profiles {
        for i in 0..pr.roots.len() {
            let v = q.eval_unchecked(&pr.point(i));
            let e = signs.entry(pr.label(i).unsigned_abs() as usize).or_default();
            if v > 1e-9 * scale {
                e.0 += 1;
            } else if v < -1e-9 * scale {
                e.1 += 1;
            }
        }
    }
    if signs.values().any(|&(pos, neg)| pos > 0 && neg > 0) {
        return Err(Error::precondition(
            "levitation",
            "q changes sign on the carrier of the density",
        ));
    }
    Ok(())
}

fn check_probe(p: &Polynomial, x: &[f64]) -> Result<f64> {
    if x.len() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: x.len(),
        });
    }
    let d = distance_to_zero_set(p, x)?;
    if d < NEAR_SINGULAR {
        return Err(Error::NearSingular { distance: d });
    }
    Ok(d)
}

fn finish(x: &[f64], coarse: (Vec<f64>, f64), fine: (Vec<f64>, f64), d: f64) -> FieldProbe {
    let n = x.len() as i32;
    let diff: Vec<f64> = coarse.0.iter().zip(&fine.0).map(|(a, b)| a - b).collect();
    let (field, mass) = fine;
    let normalized = norm(&field) / (mass / d.powi(n - 1));
    FieldProbe {
        point: x.to_vec(),
        field,
        error_estimate: norm(&diff),
        mass,
        distance: d,
        normalized,
    }
}

/// Field of a surface density at `x`. The returned field uses the refined
/// rule; the error estimate compares it with `rule`.
pub fn surface_field(spec: &MassDensitySpec, x: &[f64], rule: &QuadratureRule) -> Result<FieldProbe> {
    let p = &spec.p;
    let q = match &spec.kind {
        DensityKind::Surface { q } => Some(q),
        DensityKind::UniformSurface => None,
        DensityKind::Layer { .. } => {
            return Err(Error::input("levitation", "surface_field called with a layer density"))
        }
    };
    let d = check_probe(p, x)?;
    let coarse_set = RaySet::build(p, &spec.anchor, rule)?;
    let fine_set = RaySet::build(p, &spec.anchor, &rule.refined())?;
    if let Some(q) = q {
        check_q_on_carrier(q, &fine_set)?;
    }
    let mass = surface_mass_fn(p, q);
    Ok(finish(
        x,
        surface_sum(&coarse_set, x, &mass),
        surface_sum(&fine_set, x, &mass),
        d,
    ))
}

fn level(p: &Polynomial, lambda: f64) -> Polynomial {
    p - &Polynomial::constant(p.dim(), lambda).expect("valid dimension")
}

fn layer_sum(
    p: &Polynomial,
    q: &Polynomial,
    lo: f64,
    hi: f64,
    anchor: &[f64],
    x: &[f64],
    rule: &QuadratureRule,
    nodes: usize,
) -> Result<(Vec<f64>, f64)> {
    let (lam, wl) = gauss_legendre_on(nodes, lo, hi);
    let n = p.dim();
    let mut f = vec![Accumulator::new(); n];
    let mut m = Accumulator::new();
    for (l, w) in lam.iter().zip(&wl) {
        let pl = level(p, *l);
        let set = RaySet::build(&pl, anchor, rule)?;
        let rep = verify_on(&pl, q, &set);
        if !rep.pass {
            return Err(Error::precondition(
                "levitation",
                format!(
                    "q does not separate p - {l} ({} failing directions)",
                    rep.failures.len()
                ),
            ));
        }
        let (fl, ml) = surface_sum(&set, x, &surface_mass_fn(&pl, Some(q)));
        for c in 0..n {
            f[c].add(w * fl[c]);
        }
        m.add(w * ml);
    }
    Ok((f.iter().map(|a| a.value()).collect(), m.value()))
}

/// Field of a layer density at `x`, integrating surface fields over the
/// level value with `nodes` Gauss–Legendre points. The error estimate
/// compares against doubled direction and level resolution.
pub fn layer_field(
    spec: &MassDensitySpec,
    x: &[f64],
    rule: &QuadratureRule,
    nodes: usize,
) -> Result<FieldProbe> {
    let (q, lo, hi) = match &spec.kind {
        DensityKind::Layer { q, lo, hi } => (q, *lo, *hi),
        _ => return Err(Error::input("levitation", "layer_field needs a layer density")),
    };
    if !(lo < hi) || nodes == 0 {
        return Err(Error::input("levitation", format!("invalid layer [{lo}, {hi}] with {nodes} nodes")));
    }
    let p = &spec.p;
    let px = p.eval(x)?;
    if px >= lo && px <= hi {
        return Err(Error::precondition("levitation", "probe lies inside the layer"));
    }
    let d = check_probe(&level(p, lo), x)?.min(check_probe(&level(p, hi), x)?);
    let coarse = layer_sum(p, q, lo, hi, &spec.anchor, x, rule, nodes)?;
    let fine = layer_sum(p, q, lo, hi, &spec.anchor, x, &rule.refined(), 2 * nodes)?;
    Ok(finish(x, coarse, fine, d))
}

/// The constant field predicted inside the cavity for a separator `q` of
/// an elliptic `p`: `∫_{S+} (q_{m-1}(w)/p_m(w)) w dΩ`, after flipping signs
/// so that `p < 0 < q` at `a`. Zero for strict separators.
pub fn constant_field_prediction(
    p: &Polynomial,
    q: &Polynomial,
    a: &[f64],
    rule: &QuadratureRule,
) -> Result<Vec<f64>> {
    let (pn, qn) = sign_normalize(p, q, a)?;
    let m = pn.degree();
    let pm = pn.homogeneous_part(m);
    let qm = qn.homogeneous_part(m - 1);
    let n = p.dim();
    let scale = pm.max_abs_coeff();
    let mut acc = vec![Accumulator::new(); n];
    let mut sign = 0.0;
    for j in 0..rule.len() {
        let w = rule.node(j);
        let den = pm.eval_unchecked(w);
        if den.abs() <= 1e-12 * scale || den.signum() * sign < 0.0 {
            return Err(Error::NonElliptic);
        }
        sign = den.signum();
        if qm.is_zero() {
            continue;
        }
        let r = rule.weight(j) * qm.eval_unchecked(w) / den;
        for c in 0..n {
            acc[c].add(r * w[c]);
        }
    }
    Ok(acc.iter().map(|a| a.value()).collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct LevitationReport {
    pub density: String,
    pub convention: &'static str,
    pub probes: Vec<FieldProbe>,
    pub max_normalized: f64,
    pub prediction: Option<Vec<f64>>,
}

impl LevitationReport {
    pub fn new(density: &str, probes: Vec<FieldProbe>, prediction: Option<Vec<f64>>) -> Self {
        let max_normalized = probes.iter().fold(0.0f64, |m, p| m.max(p.normalized));
        LevitationReport {
            density: density.to_string(),
            convention: "F(x) = sum of rho(y) (y - x)/|y - x|^n; prediction = +integral of q_{m-1}/p_m w over a hemisphere with p < 0 < q in the cavity",
            probes,
            max_normalized,
            prediction,
        }
    }
}
