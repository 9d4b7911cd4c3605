//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use cavity::forward::Phantom;
use cavity::geometry::{is_oscillatory_at, segment_clear};
use cavity::{Polynomial, QuadratureRule};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn random_unit(r: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| r.gen_range(-1.0..1.0)).collect();
        let n = norm(&v);
        if n > 0.1 && n <= 1.0 {
            return v.iter().map(|x| x / n).collect();
        }
    }
}

/// Random points of the cavity around `a`: reachable from `a` without
/// crossing the zero set, oscillatory on a coarse fan, and at least `margin`
/// away from the zero set along every fan direction.
pub fn cavity_points(
    p: &Polynomial,
    a: &[f64],
    half: f64,
    margin: f64,
    count: usize,
    seed: u64,
) -> Vec<Vec<f64>> {
    let mut r = rng(seed);
    let dim = p.dim();
    let fan = match dim {
        2 => QuadratureRule::half_circle(48).unwrap(),
        _ => QuadratureRule::hemisphere(8, 16).unwrap(),
    };
    let clear = |x: &[f64]| {
        (0..fan.len()).all(|j| {
            [-1.0, 1.0].iter().all(|s| {
                let far: Vec<f64> = x.iter().zip(fan.node(j)).map(|(u, w)| u + s * margin * w).collect();
                segment_clear(p, x, &far)
            })
        })
    };
    let mut out = Vec::new();
    while out.len() < count {
        let x: Vec<f64> = (0..dim).map(|_| r.gen_range(-half..half)).collect();
        if !segment_clear(p, a, &x) || !clear(&x) {
            continue;
        }
        if matches!(is_oscillatory_at(p, &x, &fan), Ok(v) if v.is_oscillatory()) {
            out.push(x);
        }
    }
    out
}

/// A segment of the zero set from marching squares.
pub struct Segment {
    pub a: [f64; 2],
    pub b: [f64; 2],
}

impl Segment {
    pub fn mid(&self) -> [f64; 2] {
        [0.5 * (self.a[0] + self.b[0]), 0.5 * (self.a[1] + self.b[1])]
    }

    pub fn len(&self) -> f64 {
        ((self.a[0] - self.b[0]).powi(2) + (self.a[1] - self.b[1]).powi(2)).sqrt()
    }
}

/// Marching squares on `[lo, hi]²` with `res` cells per side. Saddle cells
/// are resolved by the value at the cell centre.
pub fn marching_squares(p: &Polynomial, lo: f64, hi: f64, res: usize) -> Vec<Segment> {
    let h = (hi - lo) / res as f64;
    let at = |i: usize, j: usize| [lo + i as f64 * h, lo + j as f64 * h];
    let vals: Vec<Vec<f64>> = (0..=res)
        .map(|i| (0..=res).map(|j| p.eval(&at(i, j)).unwrap()).collect())
        .collect();
    let mut segs = Vec::new();
    for i in 0..res {
        for j in 0..res {
            // corners counter-clockwise from (i, j)
            let c = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
            let v: Vec<f64> = c.iter().map(|&(a, b)| vals[a][b]).collect();
            let mut cross = Vec::new();
            for e in 0..4 {
                let (v0, v1) = (v[e], v[(e + 1) % 4]);
                if (v0 < 0.0) != (v1 < 0.0) {
                    let s = v0 / (v0 - v1);
                    let (p0, p1) = (at(c[e].0, c[e].1), at(c[(e + 1) % 4].0, c[(e + 1) % 4].1));
                    cross.push((e, [p0[0] + s * (p1[0] - p0[0]), p0[1] + s * (p1[1] - p0[1])]));
                }
            }
            match cross.len() {
                2 => segs.push(Segment {
                    a: cross[0].1,
                    b: cross[1].1,
                }),
                4 => {
                    let mid = p
                        .eval(&[lo + (i as f64 + 0.5) * h, lo + (j as f64 + 0.5) * h])
                        .unwrap();
                    // pair edges so the centre stays with the corners of its sign
                    let pair = if (mid < 0.0) == (v[0] < 0.0) { [(0, 1), (2, 3)] } else { [(3, 0), (1, 2)] };
                    for (x, y) in pair {
                        segs.push(Segment {
                            a: cross[x].1,
                            b: cross[y].1,
                        });
                    }
                }
                _ => {}
            }
        }
    }
    segs
}

/// `∫_Z ρ (y - x)/|y - x|^2 ds` and the total mass over marching-squares
/// segments, with line density `ρ = |q|/|∇p|`.
pub fn contour_field(p: &Polynomial, q: &Polynomial, x: &[f64], segs: &[Segment]) -> ([f64; 2], f64) {
    let mut f = [0.0; 2];
    let mut m = 0.0;
    for s in segs {
        let y = s.mid();
        let dm = q.eval(&y).unwrap().abs() / norm(&p.gradient(&y).unwrap()) * s.len();
        let d = [y[0] - x[0], y[1] - x[1]];
        let r2 = d[0] * d[0] + d[1] * d[1];
        f[0] += dm * d[0] / r2;
        f[1] += dm * d[1] / r2;
        m += dm;
    }
    (f, m)
}

/// An orthonormal frame whose last axis is `e`.
fn frame(e: &[f64]) -> [[f64; 3]; 3] {
    let e = [e[0], e[1], e[2]];
    let t = if e[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let d = t[0] * e[0] + t[1] * e[1] + t[2] * e[2];
    let mut u = [t[0] - d * e[0], t[1] - d * e[1], t[2] - d * e[2]];
    let nu = norm(&u);
    u.iter_mut().for_each(|v| *v /= nu);
    let w = [
        e[1] * u[2] - e[2] * u[1],
        e[2] * u[0] - e[0] * u[2],
        e[0] * u[1] - e[1] * u[0],
    ];
    [u, w, e]
}

/// Surface integral of a smooth phantom over the sphere `|y - xi| = r` by a
/// dense latitude-longitude rule with an arbitrary pole, or by the
/// trapezoid rule on the circle.
pub fn brute_smooth(f: &Phantom, xi: &[f64], r: f64) -> f64 {
    match xi.len() {
        2 => {
            let n = 4096;
            let h = 2.0 * PI / n as f64;
            (0..n)
                .map(|k| {
                    let th = k as f64 * h;
                    f.eval(&[xi[0] + r * th.cos(), xi[1] + r * th.sin()])
                })
                .sum::<f64>()
                * h
                * r
        }
        _ => {
            let [u, w, e] = frame(&[0.48, 0.6, 0.64]);
            let (cz, wz) = cavity::quadrature::gauss_legendre(200);
            let n_ph = 400;
            let h = 2.0 * PI / n_ph as f64;
            let mut s = 0.0;
            for (ct, wt) in cz.iter().zip(&wz) {
                let st = (1.0 - ct * ct).sqrt();
                let mut ring = 0.0;
                for k in 0..n_ph {
                    let (sp, cp) = (k as f64 * h).sin_cos();
                    let y: Vec<f64> = (0..3)
                        .map(|c| xi[c] + r * (st * cp * u[c] + st * sp * w[c] + ct * e[c]))
                        .collect();
                    ring += f.eval(&y);
                }
                s += ring * h * wt;
            }
            s * r * r
        }
    }
}

/// Surface integral of a ball indicator over `|y - xi| = r`, from the
/// boundary angle found by bisection on the phantom itself.
pub fn brute_ball(f: &Phantom, center: &[f64], amplitude: f64, xi: &[f64], r: f64) -> f64 {
    let d: Vec<f64> = center.iter().zip(xi).map(|(c, x)| c - x).collect();
    let dn = norm(&d);
    let n = xi.len();
    let axis: Vec<f64> = if dn > 0.0 {
        d.iter().map(|v| v / dn).collect()
    } else {
        let mut e = vec![0.0; n];
        e[0] = 1.0;
        e
    };
    let perp: Vec<f64> = if n == 2 {
        vec![-axis[1], axis[0]]
    } else {
        frame(&axis)[0].to_vec()
    };
    // point at polar angle θ from the axis
    let at = |th: f64| -> Vec<f64> {
        (0..n)
            .map(|c| xi[c] + r * (th.cos() * axis[c] + th.sin() * perp[c]))
            .collect()
    };
    // the part inside the ball is a cap around θ = 0
    let inside = |th: f64| f.eval(&at(th)) > 0.0;
    let theta0 = if !inside(0.0) {
        0.0
    } else if inside(PI) {
        PI
    } else {
        let (mut lo, mut hi) = (0.0, PI);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if inside(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let measure = if n == 2 {
        2.0 * theta0 * r
    } else {
        2.0 * PI * r * r * (1.0 - theta0.cos())
    };
    amplitude * measure
}

/// `∫_τ^∞ dρ / ((σ - ρ) √(ρ - τ))` by adaptive quadrature after
/// `ρ = τ + u²`, `u = v/(1 - v)`.
pub fn half_line_abel(sigma: f64, tau: f64) -> f64 {
    let g = |v: f64| {
        if v >= 1.0 {
            return -2.0;
        }
        let u = v / (1.0 - v);
        let du = 1.0 / ((1.0 - v) * (1.0 - v));
        2.0 * du / (sigma - tau - u * u)
    };
    cavity::quadrature::integrate_adaptive(g, 0.0, 1.0, 1e-13, 1e-12, 4000).0
}
