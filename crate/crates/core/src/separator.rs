//! Separators: polynomials `q` with one zero between consecutive zeros of `p`
//! on every line through a cavity point, and none on the segment of the line
//! inside the cavity.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{RayRootProfile, RaySet, ROOT_TOL};
use crate::poly::Polynomial;
use crate::quadrature::QuadratureRule;

/// `Σ (x_i - a_i) ∂p/∂x_i - m p`. Its restriction to the line `a + t w` is
/// `t p_t' - m p`, so the top-degree part always cancels.
pub fn euler_separator(p: &Polynomial, a: &[f64]) -> Result<Polynomial> {
    if a.len() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: a.len(),
        });
    }
    let dim = p.dim();
    let m = p.degree();
    let mut e = Polynomial::zero(dim)?;
    for (i, ai) in a.iter().enumerate() {
        let shift = &Polynomial::variable(dim, i)? - &Polynomial::constant(dim, *ai)?;
        e = &e + &(&shift * &p.derivative(i));
    }
    Ok((&e - &p.scale(m as f64)).pruned(1e-14))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailureReason {
    Interleaving,
    CentralIntervalZero,
    Degree,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Failure {
    pub omega: Vec<f64>,
    pub reason: FailureReason,
}

#[derive(Clone, Debug, Serialize)]
pub struct SeparatorReport {
    pub strict: bool,
    pub pass: bool,
    pub degree_p: usize,
    pub degree_q: usize,
    pub directions_checked: usize,
    /// Directions skipped because the zero set of `p` is degenerate there.
    pub skipped: usize,
    /// Directions where a root of `q` sits within the margin of a root of `p`
    /// and its side cannot be decided; they are neither passes nor failures.
    pub ambiguous: usize,
    pub failures: Vec<Failure>,
}

enum RayCheck {
    Ok,
    Ambiguous,
    Fail(FailureReason),
}

fn check_ray(q: &Polynomial, prof: &RayRootProfile) -> RayCheck {
    let uq = q.restrict_unchecked(&prof.base, &prof.direction);
    if uq.is_zero() {
        return RayCheck::Fail(FailureReason::CentralIntervalZero);
    }
    let qroots: Vec<f64> = match uq.real_roots(ROOT_TOL) {
        Ok(r) => r
            .iter()
            .flat_map(|r| std::iter::repeat(r.value).take(r.multiplicity))
            .collect(),
        Err(_) => return RayCheck::Fail(FailureReason::CentralIntervalZero),
    };
    let troots = &prof.roots;
    let scale = troots.iter().fold(1.0f64, |m, t| m.max(t.abs()));
    let margin = 1e-9 * scale;
    if qroots
        .iter()
        .any(|s| troots.iter().any(|t| (s - t).abs() <= margin))
    {
        return RayCheck::Ambiguous;
    }
    let count_in = |lo: f64, hi: f64| qroots.iter().filter(|&&s| s > lo && s < hi).count();

    let neg = prof.negative_count();
    let lo = if neg > 0 { troots[neg - 1] } else { f64::NEG_INFINITY };
    let hi = if neg < troots.len() { troots[neg] } else { f64::INFINITY };
    if count_in(lo, hi) > 0 {
        return RayCheck::Fail(FailureReason::CentralIntervalZero);
    }
    for (i, pair) in troots.windows(2).enumerate() {
        if i + 1 == neg {
            continue;
        }
        if count_in(pair[0], pair[1]) != 1 {
            return RayCheck::Fail(FailureReason::Interleaving);
        }
    }
    RayCheck::Ok
}

pub fn verify_separator(
    p: &Polynomial,
    q: &Polynomial,
    a: &[f64],
    rule: &QuadratureRule,
) -> Result<SeparatorReport> {
    if q.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: q.dim(),
        });
    }
    let set = RaySet::build(p, a, rule)?;
    Ok(verify_on(p, q, &set))
}

pub(crate) fn verify_on(p: &Polynomial, q: &Polynomial, set: &RaySet) -> SeparatorReport {
    let m = p.degree();
    let dq = q.degree();
    let results: Vec<RayCheck> = set.profiles.par_iter().map(|pr| check_ray(q, pr)).collect();
    let mut failures = Vec::new();
    let mut ambiguous = 0;
    if q.is_zero() || dq + 1 > m {
        failures.push(Failure {
            omega: Vec::new(),
            reason: FailureReason::Degree,
        });
    }
    for (pr, r) in set.profiles.iter().zip(results) {
        match r {
            RayCheck::Ok => {}
            RayCheck::Ambiguous => ambiguous += 1,
            RayCheck::Fail(reason) => failures.push(Failure {
                omega: pr.direction.clone(),
                reason,
            }),
        }
    }
    SeparatorReport {
        strict: !q.is_zero() && m >= 2 && dq == m - 2,
        pass: failures.is_empty(),
        degree_p: m,
        degree_q: dq,
        directions_checked: set.profiles.len(),
        skipped: set.skipped,
        ambiguous,
        failures,
    }
}

/// Flips the signs of `p` and `q` as needed so that `p(a) < 0 < q(a)`.
pub fn sign_normalize(p: &Polynomial, q: &Polynomial, a: &[f64]) -> Result<(Polynomial, Polynomial)> {
    let pa = p.eval(a)?;
    let qa = q.eval(a)?;
    if qa == 0.0 {
        return Err(Error::precondition("separators", "q vanishes at the base point"));
    }
    let p = if pa > 0.0 { -p } else { p.clone() };
    let q = if qa < 0.0 { -q } else { q.clone() };
    Ok((p, q))
}

/// After sign normalization, `q(x_k)/p_t'(x_k)` is positive on the roots
/// ahead of the base point and negative behind it.
pub fn sign_pattern_holds(p: &Polynomial, q: &Polynomial, a: &[f64], w: &[f64]) -> Result<bool> {
    let (pn, qn) = sign_normalize(p, q, a)?;
    let prof = crate::geometry::ray_roots(&pn, a, w, ROOT_TOL)?;
    if let Some(d) = prof.degeneracy {
        return Err(Error::DegenerateDirection(format!("{d:?} along {w:?}")));
    }
    Ok(prof.roots.iter().zip(&prof.derivs).enumerate().all(|(i, (t, d))| {
        let r = qn.eval_unchecked(&prof.point(i)) / d;
        if *t > 0.0 {
            r > 0.0
        } else {
            r < 0.0
        }
    }))
}
