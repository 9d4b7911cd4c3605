use crate::error::{Error, Result};

/// Leading coefficients below this fraction of the largest coefficient are
/// treated as zero when a restriction loses degree.
pub const DEGENERATE_DEGREE_TOL: f64 = 1e-12;

/// A real root together with its multiplicity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Root {
    pub value: f64,
    pub multiplicity: usize,
}

/// Univariate polynomial with coefficients in ascending powers.
///
/// `nominal` is the degree the polynomial was expected to have (for a
/// restriction `p(a + t w)` this is the total degree of `p`). When the
/// effective degree is lower the polynomial is flagged degenerate.
#[derive(Clone, Debug, PartialEq)]
pub struct UnivariatePoly {
    coeffs: Vec<f64>,
    nominal: usize,
}

impl UnivariatePoly {
    pub fn new(coeffs: Vec<f64>) -> Self {
        let n = coeffs.len().saturating_sub(1);
        Self::with_nominal_degree(coeffs, n)
    }

    pub fn with_nominal_degree(mut coeffs: Vec<f64>, nominal: usize) -> Self {
        let scale = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        while coeffs.len() > 1 && coeffs.last().unwrap().abs() <= DEGENERATE_DEGREE_TOL * scale {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        UnivariatePoly { coeffs, nominal }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn nominal_degree(&self) -> usize {
        self.nominal
    }

    pub fn is_degenerate(&self) -> bool {
        self.degree() < self.nominal
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn scale(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }

    /// Value and first derivative by a single Horner pass.
    #[inline]
    pub fn eval_with_derivative(&self, t: f64) -> (f64, f64) {
        let mut v = 0.0;
        let mut d = 0.0;
        for &c in self.coeffs.iter().rev() {
            d = d * t + v;
            v = v * t + c;
        }
        (v, d)
    }

    /// Sum of |c_i| |t|^i, the magnitude against which residuals are judged.
    pub fn local_scale(&self, t: f64) -> f64 {
        let at = t.abs();
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * at + c.abs())
    }

    pub fn derivative(&self) -> UnivariatePoly {
        if self.coeffs.len() <= 1 {
            return UnivariatePoly {
                coeffs: vec![0.0],
                nominal: 0,
            };
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| c * i as f64)
            .collect();
        UnivariatePoly {
            coeffs,
            nominal: self.nominal.saturating_sub(1),
        }
    }

    fn cauchy_bound(&self) -> f64 {
        let lead = *self.coeffs.last().unwrap();
        let m = self.coeffs[..self.coeffs.len() - 1]
            .iter()
            .fold(0.0f64, |m, c| m.max((c / lead).abs()));
        1.0 + m
    }

    /// All real roots in ascending order.
    ///
    /// Roots are isolated by recursion on the derivative: between consecutive
    /// critical points the polynomial is monotone, so each sign change brackets
    /// exactly one simple root, which is refined by safeguarded Newton steps.
    /// A critical point where `|u| <= tol * local_scale` is reported as a
    /// multiple root.
    pub fn real_roots(&self, tol: f64) -> Result<Vec<Root>> {
        if self.is_zero() {
            return Err(Error::input("poly", "real_roots of the zero polynomial"));
        }
        Ok(self.roots_inner(tol))
    }

    fn roots_inner(&self, tol: f64) -> Vec<Root> {
        match self.degree() {
            0 => Vec::new(),
            1 => vec![Root {
                value: -self.coeffs[0] / self.coeffs[1],
                multiplicity: 1,
            }],
            _ => {
                let bound = self.cauchy_bound();
                let crit: Vec<Root> = self
                    .derivative()
                    .roots_inner(tol)
                    .into_iter()
                    .filter(|r| r.value.abs() < bound)
                    .collect();

                // breakpoints with (position, value, is_root, multiplicity)
                let mut pts = Vec::with_capacity(crit.len() + 2);
                pts.push((-bound, self.eval(-bound), false, 0));
                for c in &crit {
                    let v = self.eval(c.value);
                    let zero = v.abs() <= tol * self.local_scale(c.value);
                    pts.push((c.value, v, zero, c.multiplicity + 1));
                }
                pts.push((bound, self.eval(bound), false, 0));

                let mut roots = Vec::new();
                for w in 0..pts.len() {
                    let (x, _, zero, mult) = pts[w];
                    if zero {
                        roots.push(Root {
                            value: x,
                            multiplicity: mult,
                        });
                    }
                    if w + 1 == pts.len() {
                        break;
                    }
                    let (lo, flo, zlo, _) = pts[w];
                    let (hi, fhi, zhi, _) = pts[w + 1];
                    if zlo || zhi || flo == 0.0 || fhi == 0.0 {
                        continue;
                    }
                    if (flo < 0.0) != (fhi < 0.0) {
                        roots.push(Root {
                            value: self.refine(lo, hi, flo),
                            multiplicity: 1,
                        });
                    }
                }
                roots.sort_by(|a, b| a.value.total_cmp(&b.value));
                roots
            }
        }
    }

    fn refine(&self, mut lo: f64, mut hi: f64, flo: f64) -> f64 {
        let neg_lo = flo < 0.0;
        let mut x = 0.5 * (lo + hi);
        for _ in 0..200 {
            let (v, d) = self.eval_with_derivative(x);
            if v == 0.0 {
                return x;
            }
            if (v < 0.0) == neg_lo {
                lo = x;
            } else {
                hi = x;
            }
            if hi - lo <= 2.0 * f64::EPSILON * x.abs().max(f64::MIN_POSITIVE) {
                break;
            }
            let newton = x - v / d;
            x = if d != 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if x == lo || x == hi {
                break;
            }
        }
        x
    }
}
