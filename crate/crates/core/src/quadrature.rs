//! Direction rules on the half-circle and hemisphere, Gauss–Legendre nodes,
//! and an adaptive Gauss–Kronrod integrator for smooth 1D integrands.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numeric::Accumulator;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let h = 0.5 * (b - a);
    let m = 0.5 * (b + a);
    (
        x.iter().map(|xi| m + h * xi).collect(),
        w.iter().map(|wi| h * wi).collect(),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuleShape {
    /// `n` uniform angles on `[0, pi)`.
    HalfCircle { n: usize },
    /// Gauss–Legendre in `cos(theta) > 0` times uniform azimuth.
    Hemisphere { n_polar: usize, n_az: usize },
}

/// Unit direction nodes with positive weights covering one half of the
/// circle or sphere. Opposite directions are reached through the negative
/// root branches.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    shape: RuleShape,
    nodes: Vec<[f64; 3]>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn half_circle(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::input("quadrature", "direction count must be positive"));
        }
        let h = PI / n as f64;
        let nodes = (0..n)
            .map(|j| {
                let th = (j as f64 + 0.5) * h;
                [th.cos(), th.sin(), 0.0]
            })
            .collect();
        Ok(QuadratureRule {
            shape: RuleShape::HalfCircle { n },
            nodes,
            weights: vec![h; n],
        })
    }

    pub fn hemisphere(n_polar: usize, n_az: usize) -> Result<Self> {
        if n_polar == 0 || n_az == 0 {
            return Err(Error::input("quadrature", "node counts must be positive"));
        }
        let (z, wz) = gauss_legendre(2 * n_polar);
        let h = 2.0 * PI / n_az as f64;
        let mut nodes = Vec::with_capacity(n_polar * n_az);
        let mut weights = Vec::with_capacity(n_polar * n_az);
        for (zi, wi) in z.iter().zip(&wz).skip(n_polar) {
            let s = (1.0 - zi * zi).sqrt();
            for l in 0..n_az {
                let ph = (l as f64 + 0.5) * h;
                nodes.push([s * ph.cos(), s * ph.sin(), *zi]);
                weights.push(wi * h);
            }
        }
        Ok(QuadratureRule {
            shape: RuleShape::Hemisphere { n_polar, n_az },
            nodes,
            weights,
        })
    }

    /// A rule with roughly `count` directions: exactly `count` in 2D, and a
    /// polar-by-azimuth product with about twice as many azimuths as polar
    /// rows in 3D (362 gives 13 x 28).
    pub fn with_directions(dim: usize, count: usize) -> Result<Self> {
        match dim {
            2 => Self::half_circle(count),
            3 => {
                if count == 0 {
                    return Err(Error::input("quadrature", "direction count must be positive"));
                }
                let n_polar = ((count as f64 / 2.0).sqrt().round() as usize).max(1);
                let n_az = count.div_ceil(n_polar);
                Self::hemisphere(n_polar, n_az)
            }
            d => Err(Error::UnsupportedDimension(d)),
        }
    }

    /// The next dyadic level: every node count doubled.
    pub fn refined(&self) -> Self {
        match self.shape {
            RuleShape::HalfCircle { n } => Self::half_circle(2 * n),
            RuleShape::Hemisphere { n_polar, n_az } => Self::hemisphere(2 * n_polar, 2 * n_az),
        }
        .expect("refinement of a valid rule")
    }

    pub fn dim(&self) -> usize {
        match self.shape {
            RuleShape::HalfCircle { .. } => 2,
            RuleShape::Hemisphere { .. } => 3,
        }
    }

    pub fn shape(&self) -> RuleShape {
        self.shape
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Direction `j` as a slice of length `dim`.
    pub fn node(&self, j: usize) -> &[f64] {
        &self.nodes[j][..self.dim()]
    }

    pub fn weight(&self, j: usize) -> f64 {
        self.weights[j]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_weight(&self) -> f64 {
        let mut acc = Accumulator::new();
        for w in &self.weights {
            acc.add(*w);
        }
        acc.value()
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for i in 0..7 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive Gauss–Kronrod (7/15) with interval bisection. Returns the
/// integral and an error estimate. Stops when the summed estimate drops
/// below `max(abs_tol, rel_tol |I|)` or after `max_intervals` subintervals.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> (f64, f64) {
    if a == b {
        return (0.0, 0.0);
    }
    let (v, e) = gk15(&f, a, b);
    let mut parts = vec![(a, b, v, e)];
    loop {
        let total: f64 = parts.iter().map(|p| p.2).sum();
        let err: f64 = parts.iter().map(|p| p.3).sum();
        if err <= abs_tol.max(rel_tol * total.abs()) || parts.len() >= max_intervals {
            let mut acc = Accumulator::new();
            for p in &parts {
                acc.add(p.2);
            }
            return (acc.value(), err);
        }
        let (idx, _) = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .unwrap();
        let (lo, hi, _, _) = parts.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            let mut acc = Accumulator::new();
            for p in &parts {
                acc.add(p.2);
            }
            return (acc.value(), err);
        }
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_exactness() {
        for n in [1, 2, 5, 16, 33] {
            let (x, w) = gauss_legendre(n);
            for k in 0..2 * n {
                let s: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(k as i32)).sum();
                let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
                assert!((s - exact).abs() < 1e-13, "n={n} k={k}: {s} vs {exact}");
            }
        }
    }

    #[test]
    fn rule_weights_sum_to_half_measure() {
        let r = QuadratureRule::half_circle(180).unwrap();
        assert!((r.total_weight() - PI).abs() < 1e-10);
        let r = QuadratureRule::with_directions(3, 362).unwrap();
        assert_eq!(r.shape(), RuleShape::Hemisphere { n_polar: 13, n_az: 28 });
        assert!((r.total_weight() - 2.0 * PI).abs() < 1e-10);
        assert!((r.refined().total_weight() - 2.0 * PI).abs() < 1e-10);
        for j in 0..r.len() {
            let w = r.node(j);
            assert!((w.iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-14);
            assert!(w[2] > 0.0);
        }
    }

    #[test]
    fn rules_integrate_low_order_harmonics() {
        // over the upper hemisphere: z^2 -> 2pi/3, x^2 y^2 -> 2pi/15, z^4 -> 2pi/5
        let r = QuadratureRule::hemisphere(8, 20).unwrap();
        let int = |f: &dyn Fn(&[f64]) -> f64| -> f64 {
            (0..r.len()).map(|j| r.weight(j) * f(r.node(j))).sum()
        };
        assert!((int(&|w| w[2] * w[2]) - 2.0 * PI / 3.0).abs() < 1e-12);
        assert!((int(&|w| w[0] * w[0] * w[1] * w[1]) - 2.0 * PI / 15.0).abs() < 1e-12);
        assert!((int(&|w| w[2].powi(4)) - 2.0 * PI / 5.0).abs() < 1e-12);
        let c = QuadratureRule::half_circle(16).unwrap();
        let s: f64 = (0..c.len())
            .map(|j| c.weight(j) * c.node(j)[0].powi(6))
            .sum();
        assert!((s - 5.0 * PI / 16.0).abs() < 1e-12);
    }

    #[test]
    fn adaptive_handles_peaked_integrands() {
        let (v, _) = integrate_adaptive(|x| (-(x * x) / 1e-4).exp(), -1.0, 1.0, 1e-13, 1e-13, 2000);
        assert!((v - (1e-4 * PI).sqrt()).abs() < 1e-12);
        let (v, _) = integrate_adaptive(|x| x.sqrt(), 0.0, 1.0, 1e-12, 1e-12, 2000);
        assert!((v - 2.0 / 3.0).abs() < 1e-11);
    }
}
