//! Sparse multivariate polynomials in two or three real variables.

mod text;
mod univariate;

pub use text::{format_polynomial, parse_polynomial, parse_preset, PresetFile};
pub use univariate::{Root, UnivariatePoly, DEGENERATE_DEGREE_TOL};

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::numeric::Accumulator;

/// Exponent multi-index. Unused trailing slots are zero in 2D.
pub type Exponents = [u32; 3];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Term {
    pub exps: Exponents,
    pub coeff: f64,
}

impl Term {
    pub fn degree(&self) -> u32 {
        self.exps.iter().sum()
    }
}

/// A real polynomial in `dim` variables, stored as a list of distinct
/// monomials with nonzero coefficients, in graded order.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    dim: usize,
    terms: Vec<Term>,
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 2 || dim == 3 {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(dim))
    }
}

fn order_key(e: &Exponents) -> (u32, [u32; 3]) {
    (e[0] + e[1] + e[2], *e)
}

impl Polynomial {
    /// Builds a polynomial from `(exponents, coefficient)` pairs. Repeated
    /// monomials are merged and zero coefficients dropped.
    pub fn new<I>(dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Exponents, f64)>,
    {
        check_dim(dim)?;
        let mut map: BTreeMap<(u32, [u32; 3]), Accumulator> = BTreeMap::new();
        for (exps, c) in terms {
            if dim == 2 && exps[2] != 0 {
                return Err(Error::input(
                    "poly",
                    "third exponent must be zero for a polynomial in two variables",
                ));
            }
            if !c.is_finite() {
                return Err(Error::input("poly", "non-finite coefficient"));
            }
            map.entry(order_key(&exps)).or_default().add(c);
        }
        let terms = map
            .into_iter()
            .map(|((_, exps), acc)| Term {
                exps,
                coeff: acc.value(),
            })
            .filter(|t| t.coeff != 0.0)
            .collect();
        Ok(Polynomial { dim, terms })
    }

    pub fn zero(dim: usize) -> Result<Self> {
        Self::new(dim, std::iter::empty())
    }

    pub fn constant(dim: usize, c: f64) -> Result<Self> {
        Self::new(dim, [([0, 0, 0], c)])
    }

    /// The coordinate function `x_i`.
    pub fn variable(dim: usize, i: usize) -> Result<Self> {
        check_dim(dim)?;
        if i >= dim {
            return Err(Error::input("poly", format!("variable index {i} out of range")));
        }
        let mut e = [0u32; 3];
        e[i] = 1;
        Self::new(dim, [(e, 1.0)])
    }

    /// `|x|^2 - r^2`
    pub fn sphere(dim: usize, radius: f64) -> Result<Self> {
        check_dim(dim)?;
        let mut terms = vec![([0, 0, 0], -radius * radius)];
        for i in 0..dim {
            let mut e = [0u32; 3];
            e[i] = 2;
            terms.push((e, 1.0));
        }
        Self::new(dim, terms)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; zero for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.terms.iter().map(|t| t.degree()).max().unwrap_or(0) as usize
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.iter().fold(0.0, |m, t| m.max(t.coeff.abs()))
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(())
    }

    fn power_table(&self, x: &[f64]) -> [Vec<f64>; 3] {
        let m = self.degree();
        let mut table: [Vec<f64>; 3] = Default::default();
        for (i, xi) in x.iter().enumerate() {
            let mut row = Vec::with_capacity(m + 1);
            let mut acc = 1.0;
            for _ in 0..=m {
                row.push(acc);
                acc *= xi;
            }
            table[i] = row;
        }
        table
    }

    #[inline]
    fn monomial(table: &[Vec<f64>; 3], dim: usize, e: &Exponents) -> f64 {
        let mut v = 1.0;
        for i in 0..dim {
            v *= table[i][e[i] as usize];
        }
        v
    }

    /// Evaluates the polynomial with compensated summation over monomials.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        self.check_point(x)?;
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: &[f64]) -> f64 {
        let table = self.power_table(x);
        let mut acc = Accumulator::new();
        for t in &self.terms {
            acc.add(t.coeff * Self::monomial(&table, self.dim, &t.exps));
        }
        acc.value()
    }

    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_point(x)?;
        Ok(self.gradient_unchecked(x))
    }

    pub(crate) fn gradient_unchecked(&self, x: &[f64]) -> Vec<f64> {
        let table = self.power_table(x);
        let mut acc = vec![Accumulator::new(); self.dim];
        for t in &self.terms {
            for i in 0..self.dim {
                let ei = t.exps[i];
                if ei == 0 {
                    continue;
                }
                let mut e = t.exps;
                e[i] -= 1;
                acc[i].add(t.coeff * ei as f64 * Self::monomial(&table, self.dim, &e));
            }
        }
        acc.iter().map(|a| a.value()).collect()
    }

    /// Partial derivative with respect to `x_i`.
    pub fn derivative(&self, i: usize) -> Polynomial {
        let terms = self.terms.iter().filter(|t| t.exps[i] > 0).map(|t| {
            let mut e = t.exps;
            e[i] -= 1;
            (e, t.coeff * t.exps[i] as f64)
        });
        Polynomial::new(self.dim, terms).expect("dimension already validated")
    }

    /// The homogeneous component of total degree `d`.
    pub fn homogeneous_part(&self, d: usize) -> Polynomial {
        Polynomial {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|t| t.degree() as usize == d)
                .copied()
                .collect(),
        }
    }

    pub fn scale(&self, c: f64) -> Polynomial {
        Polynomial::new(self.dim, self.terms.iter().map(|t| (t.exps, t.coeff * c)))
            .expect("dimension already validated")
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut out = Polynomial::constant(self.dim, 1.0).expect("dimension already validated");
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Drops coefficients below `rel * max|coeff|`, used to clear round-off
    /// left by cancelling constructions.
    pub fn pruned(&self, rel: f64) -> Polynomial {
        let cut = rel * self.max_abs_coeff();
        Polynomial {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|t| t.coeff.abs() > cut)
                .copied()
                .collect(),
        }
    }

    /// The restriction `t -> p(a + t w)` as exact univariate coefficients.
    pub fn restrict_to_line(&self, a: &[f64], w: &[f64]) -> Result<UnivariatePoly> {
        self.check_point(a)?;
        self.check_point(w)?;
        let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::NonUnitDirection(norm));
        }
        Ok(self.restrict_unchecked(a, w))
    }

    pub(crate) fn restrict_unchecked(&self, a: &[f64], w: &[f64]) -> UnivariatePoly {
        let m = self.degree();
        // binomial expansions of (a_i + t w_i)^e for e = 0..=m
        let mut expansions: [Vec<Vec<f64>>; 3] = Default::default();
        for i in 0..self.dim {
            let mut rows = Vec::with_capacity(m + 1);
            let mut cur = vec![1.0];
            rows.push(cur.clone());
            for _ in 0..m {
                let mut next = vec![0.0; cur.len() + 1];
                for (k, c) in cur.iter().enumerate() {
                    next[k] += c * a[i];
                    next[k + 1] += c * w[i];
                }
                rows.push(next.clone());
                cur = next;
            }
            expansions[i] = rows;
        }
        let mut acc = vec![Accumulator::new(); m + 1];
        let mut prod = Vec::with_capacity(m + 1);
        let mut tmp = Vec::with_capacity(m + 1);
        for term in &self.terms {
            prod.clear();
            prod.push(term.coeff);
            for i in 0..self.dim {
                let f = &expansions[i][term.exps[i] as usize];
                if f.len() == 1 {
                    for c in prod.iter_mut() {
                        *c *= f[0];
                    }
                    continue;
                }
                tmp.clear();
                tmp.resize(prod.len() + f.len() - 1, 0.0);
                for (j, pj) in prod.iter().enumerate() {
                    for (k, fk) in f.iter().enumerate() {
                        tmp[j + k] += pj * fk;
                    }
                }
                std::mem::swap(&mut prod, &mut tmp);
            }
            for (k, c) in prod.iter().enumerate() {
                acc[k].add(*c);
            }
        }
        UnivariatePoly::with_nominal_degree(acc.iter().map(|a| a.value()).collect(), m)
    }
}

fn combine(a: &Polynomial, b: &Polynomial, sign: f64) -> Polynomial {
    assert_eq!(a.dim, b.dim, "polynomial dimensions differ");
    let terms = a
        .terms
        .iter()
        .map(|t| (t.exps, t.coeff))
        .chain(b.terms.iter().map(|t| (t.exps, sign * t.coeff)));
    Polynomial::new(a.dim, terms).expect("dimension already validated")
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        combine(self, rhs, 1.0)
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        combine(self, rhs, -1.0)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.dim, rhs.dim, "polynomial dimensions differ");
        let mut terms = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for s in &self.terms {
            for r in &rhs.terms {
                let e = [
                    s.exps[0] + r.exps[0],
                    s.exps[1] + r.exps[1],
                    s.exps[2] + r.exps[2],
                ];
                terms.push((e, s.coeff * r.coeff));
            }
        }
        Polynomial::new(self.dim, terms).expect("dimension already validated")
    }
}

impl Mul<f64> for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: f64) -> Polynomial {
        self.scale(rhs)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $f(self, rhs: Polynomial) -> Polynomial {
                (&self).$f(&rhs)
            }
        }
        impl $tr<&Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $f(self, rhs: &Polynomial) -> Polynomial {
                (&self).$f(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Mul<f64> for Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: f64) -> Polynomial {
        self.scale(rhs)
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    #[test]
    fn eval_examples() {
        let p = presets::degree_six().p;
        assert_eq!(p.eval(&[0.0, 0.0]).unwrap(), -20.0);
        let s = Polynomial::sphere(3, 1.0).unwrap();
        assert_eq!(s.eval(&[0.0, 0.0, 0.0]).unwrap(), -1.0);
        assert_eq!(s.eval(&[1.0, 0.0, 0.0]).unwrap(), 0.0);
        assert!(matches!(
            s.eval(&[1.0, 0.0]),
            Err(Error::DimensionMismatch { expected: 3, got: 2 })
        ));
    }

    #[test]
    fn gradient_examples() {
        let s = Polynomial::sphere(3, 1.0).unwrap();
        assert_eq!(s.gradient(&[1.0, 0.0, 0.0]).unwrap(), vec![2.0, 0.0, 0.0]);
        let h = Polynomial::new(2, [([2, 0, 0], 1.0), ([0, 2, 0], -1.0), ([0, 0, 0], -1.0)])
            .unwrap();
        assert_eq!(h.gradient(&[2.0, 1.0]).unwrap(), vec![4.0, -2.0]);
    }

    #[test]
    fn gradient_matches_central_differences() {
        let p = presets::degree_six().p;
        let x = [1.0, 1.0];
        let g = p.gradient(&x).unwrap();
        let h = 1e-5;
        for i in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[i] += h;
            xm[i] -= h;
            let fd = (p.eval(&xp).unwrap() - p.eval(&xm).unwrap()) / (2.0 * h);
            assert!((fd - g[i]).abs() <= 1e-6 * g[i].abs().max(1.0), "{fd} vs {}", g[i]);
        }
    }

    #[test]
    fn restriction_examples() {
        let c = Polynomial::sphere(2, 1.0).unwrap();
        let u = c.restrict_to_line(&[0.0, 0.0], &[1.0, 0.0]).unwrap();
        assert_eq!(u.coeffs(), &[-1.0, 0.0, 1.0]);

        let p = presets::degree_six().p;
        let u = p.restrict_to_line(&[0.0, 0.0], &[1.0, 0.0]).unwrap();
        assert_eq!(u.coeffs(), &[-20.0, 0.0, 30.0, 0.0, -12.0, 0.0, 1.0]);
        assert!(!u.is_degenerate());

        let xy = Polynomial::new(2, [([1, 1, 0], 1.0), ([0, 0, 0], -1.0)]).unwrap();
        let u = xy.restrict_to_line(&[0.0, 0.0], &[1.0, 0.0]).unwrap();
        assert!(u.is_degenerate());
        assert_eq!(u.degree(), 0);
        assert_eq!(u.eval(3.0), -1.0);

        assert!(matches!(
            c.restrict_to_line(&[0.0, 0.0], &[1.0, 1.0]),
            Err(Error::NonUnitDirection(_))
        ));
    }

    #[test]
    fn arithmetic_merges_and_cancels() {
        let x = Polynomial::variable(2, 0).unwrap();
        let y = Polynomial::variable(2, 1).unwrap();
        let d = (&x + &y) * (&x - &y);
        assert_eq!(d.terms().len(), 2);
        assert_eq!(d.degree(), 2);
        let z = &d - &d;
        assert!(z.is_zero());
        assert_eq!(x.derivative(0), Polynomial::constant(2, 1.0).unwrap());
    }

    #[test]
    fn rejects_bad_dimension() {
        assert!(matches!(
            Polynomial::sphere(4, 1.0),
            Err(Error::UnsupportedDimension(4))
        ));
        assert!(Polynomial::new(2, [([0, 0, 1], 1.0)]).is_err());
    }
}
