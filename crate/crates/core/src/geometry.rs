//! Oscillatory zero sets seen from a base point: ordered roots along rays,
//! the cavity of points from which every line meets the zero set `m`
//! times, the nested ovals, and integration against the Leray form.
//!
//! In polar coordinates about a cavity point `a` the Leray form of `p`
//! restricted to the zero set is `|t|^{n-1} sgn(t) / p_t' dOmega`, where
//! `p_t'` is the derivative of `t -> p(a + t w)`. Summing both root branches
//! over a hemisphere of directions covers the zero set once. For `n = 2`
//! the weight is `t / p_t'`.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, ScalarGrid};
use crate::numeric::Accumulator;
use crate::poly::Polynomial;
use crate::quadrature::QuadratureRule;

/// Root residual tolerance, relative to the local coefficient scale.
pub const ROOT_TOL: f64 = 1e-12;
/// Roots closer than this (relative to `max(1, |t|)`) count as coalesced.
pub const COALESCENCE_GAP: f64 = 1e-8;
/// Largest tolerated fraction of skipped directions.
pub const MAX_DEGENERATE_FRACTION: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Degeneracy {
    /// The restriction lost degree.
    DegreeDrop,
    /// A multiple root, or two roots closer than [`COALESCENCE_GAP`].
    Coalescence,
    /// Fewer than `m` real roots.
    MissingRoots,
}

/// Real roots of `t -> p(a + t w)`, ascending, with `p_t'` at each root.
#[derive(Clone, Debug)]
pub struct RayRootProfile {
    pub base: Vec<f64>,
    pub direction: Vec<f64>,
    pub roots: Vec<f64>,
    pub derivs: Vec<f64>,
    pub degeneracy: Option<Degeneracy>,
}

impl RayRootProfile {
    pub fn is_degenerate(&self) -> bool {
        self.degeneracy.is_some()
    }

    /// Number of roots on the negative side.
    pub fn negative_count(&self) -> usize {
        self.roots.iter().take_while(|&&t| t < 0.0).count()
    }

    /// Root `t_k` for `k = ±1, ±2, ...`, counted outward from the base point.
    pub fn branch(&self, k: i32) -> Option<f64> {
        self.branch_index(k).map(|i| self.roots[i])
    }

    pub fn branch_index(&self, k: i32) -> Option<usize> {
        let neg = self.negative_count();
        if k > 0 {
            let i = neg + k as usize - 1;
            (i < self.roots.len()).then_some(i)
        } else if k < 0 {
            neg.checked_sub((-k) as usize)
        } else {
            None
        }
    }

    /// Signed branch label of root `i`.
    pub fn label(&self, i: usize) -> i32 {
        let neg = self.negative_count();
        if i < neg {
            -((neg - i) as i32)
        } else {
            (i - neg + 1) as i32
        }
    }

    pub fn point(&self, i: usize) -> Vec<f64> {
        let t = self.roots[i];
        self.base
            .iter()
            .zip(&self.direction)
            .map(|(a, w)| a + t * w)
            .collect()
    }

    /// Leray weight `sgn(t) |t|^{n-1} / p_t'` of root `i`.
    pub fn leray_weight(&self, i: usize) -> f64 {
        let t = self.roots[i];
        let n = self.base.len() as i32;
        t.signum() * t.abs().powi(n - 1) / self.derivs[i]
    }
}

fn check_unit(w: &[f64]) -> Result<()> {
    let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::NonUnitDirection(norm));
    }
    Ok(())
}

fn check_point(p: &Polynomial, x: &[f64]) -> Result<()> {
    if x.len() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: x.len(),
        });
    }
    Ok(())
}

/// `p(a)`, rejecting points on the zero set.
pub fn base_value(p: &Polynomial, a: &[f64]) -> Result<f64> {
    check_point(p, a)?;
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let v = p.eval_unchecked(a);
    let scale = p
        .terms()
        .iter()
        .map(|t| {
            let mut m = t.coeff.abs();
            for i in 0..p.dim() {
                m *= a[i].abs().powi(t.exps[i] as i32);
            }
            m
        })
        .sum::<f64>();
    if v.abs() <= 1e-14 * scale {
        return Err(Error::BasePointOnZero { value: v });
    }
    Ok(v)
}

pub fn ray_roots(p: &Polynomial, a: &[f64], w: &[f64], tol: f64) -> Result<RayRootProfile> {
    base_value(p, a)?;
    check_point(p, w)?;
    check_unit(w)?;
    Ok(ray_roots_unchecked(p, a, w, tol))
}

pub(crate) fn ray_roots_unchecked(p: &Polynomial, a: &[f64], w: &[f64], tol: f64) -> RayRootProfile {
    let m = p.degree();
    let u = p.restrict_unchecked(a, w);
    let mut prof = RayRootProfile {
        base: a.to_vec(),
        direction: w.to_vec(),
        roots: Vec::new(),
        derivs: Vec::new(),
        degeneracy: None,
    };
    if u.is_degenerate() {
        prof.degeneracy = Some(Degeneracy::DegreeDrop);
        return prof;
    }
    let roots = u.real_roots(tol).expect("restriction of a nonzero polynomial with full degree");
    let du = u.derivative();
    let mut count = 0;
    for r in &roots {
        count += r.multiplicity;
        if r.multiplicity > 1 {
            prof.degeneracy = Some(Degeneracy::Coalescence);
        }
        prof.roots.push(r.value);
        prof.derivs.push(du.eval(r.value));
    }
    for pair in prof.roots.windows(2) {
        if pair[1] - pair[0] < COALESCENCE_GAP * pair[0].abs().max(pair[1].abs()).max(1.0) {
            prof.degeneracy = Some(Degeneracy::Coalescence);
        }
    }
    if prof.degeneracy.is_none() && count < m {
        prof.degeneracy = Some(Degeneracy::MissingRoots);
    }
    prof
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Verdict {
    Oscillatory { directions: usize, skipped: usize },
    Counterexample { omega: Vec<f64> },
    Inconclusive { degenerate_fraction: f64 },
}

impl Verdict {
    pub fn is_oscillatory(&self) -> bool {
        matches!(self, Verdict::Oscillatory { .. })
    }
}

fn profiles(p: &Polynomial, a: &[f64], rule: &QuadratureRule) -> Vec<RayRootProfile> {
    (0..rule.len())
        .into_par_iter()
        .map(|j| ray_roots_unchecked(p, a, rule.node(j), ROOT_TOL))
        .collect()
}

pub fn is_oscillatory_at(p: &Polynomial, a: &[f64], rule: &QuadratureRule) -> Result<Verdict> {
    base_value(p, a)?;
    check_rule(p, rule)?;
    Ok(verdict_of(&profiles(p, a, rule)))
}

fn verdict_of(profs: &[RayRootProfile]) -> Verdict {
    if let Some(bad) = profs
        .iter()
        .find(|pr| pr.degeneracy == Some(Degeneracy::MissingRoots))
    {
        return Verdict::Counterexample {
            omega: bad.direction.clone(),
        };
    }
    let skipped = profs.iter().filter(|pr| pr.is_degenerate()).count();
    let frac = skipped as f64 / profs.len() as f64;
    if frac >= MAX_DEGENERATE_FRACTION {
        return Verdict::Inconclusive {
            degenerate_fraction: frac,
        };
    }
    Verdict::Oscillatory {
        directions: profs.len(),
        skipped,
    }
}

fn check_rule(p: &Polynomial, rule: &QuadratureRule) -> Result<()> {
    if rule.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: rule.dim(),
        });
    }
    Ok(())
}

/// The usable directions from a cavity point, with weights rescaled so that
/// they still sum to the measure of the half-sphere.
#[derive(Clone, Debug)]
pub struct RaySet {
    pub dim: usize,
    pub base: Vec<f64>,
    pub p_base: f64,
    pub profiles: Vec<RayRootProfile>,
    pub weights: Vec<f64>,
    /// Rule index of each kept direction.
    pub indices: Vec<usize>,
    pub skipped: usize,
}

impl RaySet {
    pub fn build(p: &Polynomial, a: &[f64], rule: &QuadratureRule) -> Result<Self> {
        let p_base = base_value(p, a)?;
        check_rule(p, rule)?;
        let profs = profiles(p, a, rule);
        match verdict_of(&profs) {
            Verdict::Counterexample { omega } => {
                return Err(Error::NotOscillatory(format!(
                    "direction {omega:?} meets the zero set in fewer than {} points",
                    p.degree()
                )))
            }
            Verdict::Inconclusive {
                degenerate_fraction,
            } => {
                return Err(Error::TooManyDegenerate {
                    fraction: degenerate_fraction,
                })
            }
            Verdict::Oscillatory { .. } => {}
        }
        let total = rule.total_weight();
        let mut kept = Vec::new();
        let mut weights = Vec::new();
        let mut indices = Vec::new();
        for (j, pr) in profs.into_iter().enumerate() {
            if !pr.is_degenerate() {
                weights.push(rule.weight(j));
                indices.push(j);
                kept.push(pr);
            }
        }
        let skipped = rule.len() - kept.len();
        let kept_total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w *= total / kept_total;
        }
        Ok(RaySet {
            dim: p.dim(),
            base: a.to_vec(),
            p_base,
            profiles: kept,
            weights,
            indices,
            skipped,
        })
    }

    /// Number of (direction, root) pairs.
    pub fn center_count(&self) -> usize {
        self.profiles.iter().map(|p| p.roots.len()).sum()
    }

    /// Every zero-set sample as (point, quadrature weight times Leray weight),
    /// direction-major then ascending root.
    pub fn centers(&self) -> Vec<(Vec<f64>, f64)> {
        let mut out = Vec::with_capacity(self.center_count());
        for (pr, w) in self.profiles.iter().zip(&self.weights) {
            for i in 0..pr.roots.len() {
                out.push((pr.point(i), w * pr.leray_weight(i)));
            }
        }
        out
    }
}

/// `∫_Z g dξ/dp` by the polar formula about the cavity point `a`.
pub fn leray_integrate<G>(p: &Polynomial, a: &[f64], g: G, rule: &QuadratureRule) -> Result<f64>
where
    G: Fn(&[f64]) -> f64 + Sync,
{
    let set = RaySet::build(p, a, rule)?;
    Ok(leray_sum(&set, &g))
}

pub fn leray_sum<G: Fn(&[f64]) -> f64 + Sync>(set: &RaySet, g: &G) -> f64 {
    let per_dir: Vec<f64> = set
        .profiles
        .par_iter()
        .zip(&set.weights)
        .map(|(pr, w)| {
            let mut acc = Accumulator::new();
            for i in 0..pr.roots.len() {
                acc.add(g(&pr.point(i)) * pr.leray_weight(i));
            }
            w * acc.value()
        })
        .collect();
    let mut acc = Accumulator::new();
    for v in per_dir {
        acc.add(v);
    }
    acc.value()
}

/// Area of the unit sphere in `R^n`.
pub fn unit_sphere_area(n: usize) -> f64 {
    match n {
        2 => 2.0 * std::f64::consts::PI,
        3 => 4.0 * std::f64::consts::PI,
        _ => panic!("dimension {n}"),
    }
}

/// `|S^{n-1}|^{-1} ∫_Z |ξ - x|^{-n} dξ/dp`, which equals `-1/(2 p(x))` for
/// `x` in the cavity.
pub fn dominator(p: &Polynomial, a: &[f64], x: &[f64], rule: &QuadratureRule) -> Result<f64> {
    check_point(p, x)?;
    let n = p.dim() as i32;
    let v = leray_integrate(
        p,
        a,
        |xi| {
            let d2: f64 = xi.iter().zip(x).map(|(u, v)| (u - v) * (u - v)).sum();
            d2.sqrt().powi(-n)
        },
        rule,
    )?;
    Ok(v / unit_sphere_area(p.dim()))
}

/// `|Σ_k 1/(t_k p_t'(a + t_k w)) + 1/p(a)|`
pub fn residue_identity_defect(p: &Polynomial, a: &[f64], w: &[f64]) -> Result<f64> {
    let pa = base_value(p, a)?;
    let prof = ray_roots(p, a, w, ROOT_TOL)?;
    if let Some(d) = prof.degeneracy {
        return Err(Error::DegenerateDirection(format!("{d:?} along {w:?}")));
    }
    let mut acc = Accumulator::new();
    for (t, d) in prof.roots.iter().zip(&prof.derivs) {
        acc.add(1.0 / (t * d));
    }
    acc.add(1.0 / pa);
    Ok(acc.value().abs())
}

/// True when `x` is reachable from the cavity point `a` without crossing the
/// zero set: `p` has no root on the closed segment from `a` to `x`.
pub fn segment_clear(p: &Polynomial, a: &[f64], x: &[f64]) -> bool {
    let d: Vec<f64> = x.iter().zip(a).map(|(u, v)| u - v).collect();
    let len = d.iter().map(|v| v * v).sum::<f64>().sqrt();
    if len == 0.0 {
        return p.eval_unchecked(a) != 0.0;
    }
    let w: Vec<f64> = d.iter().map(|v| v / len).collect();
    let u = p.restrict_unchecked(a, &w);
    if u.is_zero() {
        return false;
    }
    match u.real_roots(ROOT_TOL) {
        Ok(roots) => !roots.iter().any(|r| r.value >= 0.0 && r.value <= len),
        Err(_) => false,
    }
}

/// Cells of a box marked 1 where the zero set is oscillatory about the cell
/// centre.
#[derive(Clone, Debug)]
pub struct CavityMask {
    pub grid: ScalarGrid,
    pub p: Polynomial,
    pub directions: usize,
}

pub fn cavity_mask(p: &Polynomial, spec: &GridSpec, rule: &QuadratureRule) -> Result<CavityMask> {
    if spec.dim != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: spec.dim,
        });
    }
    check_rule(p, rule)?;
    let values = (0..spec.len())
        .into_par_iter()
        .map(|f| {
            let x = spec.point(f);
            if base_value(p, &x).is_err() {
                return 0.0;
            }
            let profs: Vec<RayRootProfile> = (0..rule.len())
                .map(|j| ray_roots_unchecked(p, &x, rule.node(j), ROOT_TOL))
                .collect();
            if verdict_of(&profs).is_oscillatory() {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    Ok(CavityMask {
        grid: ScalarGrid {
            spec: spec.clone(),
            values,
        },
        p: p.clone(),
        directions: rule.len(),
    })
}

impl CavityMask {
    pub fn marked(&self) -> usize {
        self.grid.values.iter().filter(|&&v| v > 0.5).count()
    }

    pub fn is_marked(&self, idx: &[usize]) -> bool {
        self.grid.values[self.grid.spec.flat(idx)] > 0.5
    }

    /// Pairs of marked cells whose midpoint falls in no marked cell. The
    /// midpoint may sit between cells, in which case any of the neighbouring
    /// cells counts. At most `max_pairs` pairs are examined, spread evenly.
    pub fn convexity_violations(&self, max_pairs: usize) -> usize {
        let spec = &self.grid.spec;
        let marked: Vec<[usize; 3]> = (0..spec.len())
            .filter(|&f| self.grid.values[f] > 0.5)
            .map(|f| spec.index(f))
            .collect();
        let k = marked.len();
        let total = k * k.saturating_sub(1) / 2;
        let stride = (total / max_pairs.max(1)).max(1);
        let mut bad = 0;
        let mut counter = 0usize;
        for i in 0..k {
            for j in i + 1..k {
                counter += 1;
                if counter % stride != 0 {
                    continue;
                }
                let (a, b) = (marked[i], marked[j]);
                let mut choices: Vec<Vec<usize>> = vec![Vec::new()];
                for ax in 0..spec.dim {
                    let s = a[ax] + b[ax];
                    let opts = if s % 2 == 0 {
                        vec![s / 2]
                    } else {
                        vec![s / 2, s / 2 + 1]
                    };
                    choices = choices
                        .into_iter()
                        .flat_map(|c| {
                            opts.iter().map(move |&o| {
                                let mut c = c.clone();
                                c.push(o);
                                c
                            })
                        })
                        .collect();
                }
                if !choices.iter().any(|c| self.is_marked(c)) {
                    bad += 1;
                }
            }
        }
        bad
    }
}

/// Point clouds of the nested ovals seen from a cavity point. Oval `k`
/// collects the `k`-th root on each side of the base point.
#[derive(Clone, Debug)]
pub struct Ovals {
    pub dim: usize,
    pub clouds: Vec<Vec<Vec<f64>>>,
    /// Per direction, oval `k` lies strictly inside oval `k + 1`.
    pub nested: bool,
}

pub fn extract_ovals(p: &Polynomial, a: &[f64], rule: &QuadratureRule) -> Result<Ovals> {
    let set = RaySet::build(p, a, rule)?;
    let mu = p.degree() / 2;
    let mut clouds = vec![Vec::new(); mu];
    let mut nested = true;
    for pr in &set.profiles {
        let neg = pr.negative_count();
        if neg != mu || pr.roots.len() != 2 * mu {
            return Err(Error::NotOscillatory(format!(
                "along {:?} the roots are not split evenly around the base point",
                pr.direction
            )));
        }
        for k in 1..=mu as i32 {
            for s in [-1, 1] {
                let i = pr.branch_index(s * k).unwrap();
                clouds[k as usize - 1].push(pr.point(i));
            }
            if k < mu as i32 {
                let inner = pr.branch(k).unwrap() < pr.branch(k + 1).unwrap()
                    && pr.branch(-k).unwrap() > pr.branch(-k - 1).unwrap();
                nested &= inner;
            }
        }
    }
    Ok(Ovals {
        dim: p.dim(),
        clouds,
        nested,
    })
}

impl Ovals {
    fn write_rows(&self, w: &mut impl Write, only: Option<usize>) -> Result<()> {
        writeln!(w, "{}", if self.dim == 2 { "x,y,oval" } else { "x,y,z,oval" })?;
        for (k, cloud) in self.clouds.iter().enumerate() {
            if only.is_some_and(|o| o != k) {
                continue;
            }
            for pt in cloud {
                for c in pt {
                    write!(w, "{c:.16e},")?;
                }
                writeln!(w, "{}", k + 1)?;
            }
        }
        Ok(())
    }

    /// All clouds in one CSV, `x,y[,z],oval` with ovals numbered from 1.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(fs::File::create(path)?);
        self.write_rows(&mut w, None)?;
        w.flush()?;
        Ok(())
    }

    /// A single oval (numbered from 1) in the same layout.
    pub fn write_oval_csv(&self, k: usize, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(fs::File::create(path)?);
        self.write_rows(&mut w, Some(k - 1))?;
        w.flush()?;
        Ok(())
    }
}
