//! Reconstruction by time reversal: record the free-space wave on the zero
//! set, filter the record with `F = -∂_t (2/t) ∂_t`, send it back in reverse
//! time, and multiply the refocused field by `-2p`.
//!
//! Traces live on a uniform grid in `tau = t^2`, where `F u = -8 t ∂_τ² u`.
//!
//! In three dimensions the trace is `u = Rf/(4πt)` and the backward kernel
//! localises on the light cone, so the refocused field is
//! `g(x) = Σ w v(|x-ξ|)/(4π|x-ξ|)`. In two dimensions the Poisson formula
//! gives `u(τ) = (1/4π) ∫_0^τ Sf(σ)/√(τ-σ) dσ` with `Sf(σ) = Rf(√σ)/√σ`,
//! and the backward propagation is `g(x) = Σ w (1/2π) ∫_{|x-ξ|}^T
//! v(t)/√(t²-|x-ξ|²) dt`. Running the recorded data backwards from the
//! horizon `T` against the backward kernel is the same integral as
//! propagating the reversed record forward; the code evaluates the former.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fbp::{backproject, divide_by_radius, Reconstruction, MIN_SIGMA_INTERVALS};
use crate::forward::{read_columns, write_columns, Sinogram};
use crate::grid::GridSpec;
use crate::numeric::{extrapolate_to_origin, second_derivative, Interpolation};
use crate::poly::Polynomial;
use crate::quadrature::gauss_legendre_on;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceKind {
    /// The pressure `u` recorded on the zero set.
    Pressure,
    /// The filtered record `v = F u`.
    Filtered,
}

impl TraceKind {
    fn tag(self) -> &'static str {
        match self {
            TraceKind::Pressure => "trace-u",
            TraceKind::Filtered => "trace-v",
        }
    }
}

/// Columns sampled at `tau_i = i Δτ` for every centre. `data.n_sigma` and
/// `data.d_sigma` hold the time grid.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryTrace {
    pub kind: TraceKind,
    pub data: Sinogram,
}

impl BoundaryTrace {
    pub fn d_tau(&self) -> f64 {
        self.data.d_sigma
    }

    pub fn n_tau(&self) -> usize {
        self.data.n_sigma
    }

    pub fn write_csv(&self, path: &std::path::Path) -> Result<()> {
        write_columns(path, self.kind.tag(), &self.data)
    }

    pub fn read_csv(path: &std::path::Path) -> Result<Self> {
        let (tag, data) = read_columns(path)?;
        let kind = match tag.as_str() {
            "trace-u" => TraceKind::Pressure,
            "trace-v" => TraceKind::Filtered,
            t => {
                return Err(Error::input(
                    "time_reversal",
                    format!("{} is a {t} file", path.display()),
                ))
            }
        };
        Ok(BoundaryTrace { kind, data })
    }
}

fn check_grid(n: usize) -> Result<()> {
    if n < MIN_SIGMA_INTERVALS {
        return Err(Error::GridTooCoarse { n_sigma: n });
    }
    Ok(())
}

/// Cubic Lagrange basis on four nodes at the given offsets from the left end
/// of a unit cell, as monomial coefficients in the cell coordinate.
fn lagrange_basis(offsets: [f64; 4]) -> [[f64; 4]; 4] {
    let mut out = [[0.0; 4]; 4];
    for k in 0..4 {
        let mut poly = vec![1.0];
        let mut den = 1.0;
        for m in 0..4 {
            if m == k {
                continue;
            }
            let mut next = vec![0.0; poly.len() + 1];
            for (i, c) in poly.iter().enumerate() {
                next[i] -= offsets[m] * c;
                next[i + 1] += c;
            }
            poly = next;
            den *= offsets[k] - offsets[m];
        }
        for c in 0..4 {
            out[k][c] = poly[c] / den;
        }
    }
    out
}

/// Node offsets of the stencil used on cell `l` of a grid with `n` cells.
fn stencil(l: usize, n: usize) -> (usize, usize) {
    if l == 0 {
        (0, 0)
    } else if l + 1 == n {
        (2, n - 3)
    } else {
        (1, l - 1)
    }
}

const OFFSETS: [[f64; 4]; 3] = [
    [0.0, 1.0, 2.0, 3.0],
    [-1.0, 0.0, 1.0, 2.0],
    [-2.0, -1.0, 0.0, 1.0],
];

/// Per-cell weights for `∫ f(x) K_d(x) dx` over a unit cell, with `f` the
/// cubic interpolant on each stencil type: `[type][d][node]`.
fn cell_weights(moments: &[[f64; 4]]) -> Vec<Vec<[f64; 4]>> {
    OFFSETS
        .iter()
        .map(|off| {
            let basis = lagrange_basis(*off);
            moments
                .iter()
                .map(|m| {
                    let mut w = [0.0; 4];
                    for k in 0..4 {
                        w[k] = (0..4).map(|c| basis[k][c] * m[c]).sum();
                    }
                    w
                })
                .collect()
        })
        .collect()
}

/// `∫_0^1 x^k (d - x)^{-1/2} dx` for `d = 0..=n` (entry 0 unused).
fn moments_behind(n: usize) -> Vec<[f64; 4]> {
    let (x, w) = gauss_legendre_on(16, 0.0, 1.0);
    let mut out = vec![[0.0; 4]; n + 1];
    if n >= 1 {
        out[1] = [2.0, 4.0 / 3.0, 16.0 / 15.0, 32.0 / 35.0];
    }
    for (d, m) in out.iter_mut().enumerate().skip(2) {
        for c in 0..4 {
            m[c] = x
                .iter()
                .zip(&w)
                .map(|(xi, wi)| wi * xi.powi(c as i32) / (d as f64 - xi).sqrt())
                .sum();
        }
    }
    out
}

/// `∫_0^1 x^k (d + x)^{-1/2} dx` for `d = 0..n`.
fn moments_ahead(n: usize) -> Vec<[f64; 4]> {
    let (x, w) = gauss_legendre_on(16, 0.0, 1.0);
    let mut out = vec![[0.0; 4]; n.max(1)];
    out[0] = [2.0, 2.0 / 3.0, 2.0 / 5.0, 2.0 / 7.0];
    for (d, m) in out.iter_mut().enumerate().skip(1) {
        for c in 0..4 {
            m[c] = x
                .iter()
                .zip(&w)
                .map(|(xi, wi)| wi * xi.powi(c as i32) / (d as f64 + xi).sqrt())
                .sum();
        }
    }
    out
}

/// `∫_0^{τ_i} s(σ)/√(τ_i - σ) dσ` at every node, product integration with
/// local cubics.
fn abel_forward(s: &[f64], h: f64) -> Vec<f64> {
    let n = s.len() - 1;
    let w = cell_weights(&moments_behind(n));
    let sh = h.sqrt();
    (0..=n)
        .into_par_iter()
        .map(|i| {
            let mut acc = 0.0;
            for l in 0..i {
                let (ty, first) = stencil(l, n);
                let wt = &w[ty][i - l];
                for k in 0..4 {
                    acc += wt[k] * s[first + k];
                }
            }
            acc * sh
        })
        .collect()
}

/// `∫_{σ_i}^{τ_n} w(τ)/√(τ - σ_i) dτ` at every node.
fn abel_backward(col: &[f64], h: f64) -> Vec<f64> {
    let n = col.len() - 1;
    let w = cell_weights(&moments_ahead(n));
    let sh = h.sqrt();
    (0..=n)
        .into_par_iter()
        .map(|i| {
            let mut acc = 0.0;
            for l in i..n {
                let (ty, first) = stencil(l, n);
                let wt = &w[ty][l - i];
                for k in 0..4 {
                    acc += wt[k] * col[first + k];
                }
            }
            acc * sh
        })
        .collect()
}

/// `∫_0^1 y (a - b y)^{-1/2} dy` for `0 <= b < a`.
fn tail_factor(a: f64, b: f64) -> f64 {
    if b <= 0.5 * a {
        let (x, w) = gauss_legendre_on(24, 0.0, 1.0);
        x.iter().zip(&w).map(|(y, wi)| wi * y / (a - b * y).sqrt()).sum()
    } else {
        (4.0 * a * a.sqrt() - 2.0 * (2.0 * a + b) * (a - b).sqrt()) / (3.0 * b * b)
    }
}

/// Step one: the pressure trace on the zero set. In two dimensions the
/// trace runs to `horizon` (in `tau`), default `1.2` times the sinogram
/// range; the data is zero-extended.
pub fn transmit(s: &Sinogram, horizon: Option<f64>) -> Result<BoundaryTrace> {
    check_grid(s.n_sigma)?;
    let d = s.d_sigma;
    let data = match s.dim {
        3 => s.map_columns(|c| {
            divide_by_radius(c, d)
                .into_iter()
                .map(|g| g / (4.0 * PI))
                .collect()
        }),
        2 => {
            let t2 = horizon.unwrap_or(1.2 * s.sigma_max());
            if !(t2 >= s.sigma_max()) {
                return Err(Error::input(
                    "time_reversal",
                    format!("horizon {t2} is shorter than the data range {}", s.sigma_max()),
                ));
            }
            let n_tau = (t2 / d).ceil() as usize;
            let mut out = s.map_columns(|c| {
                let mut g = divide_by_radius(c, d);
                g.resize(n_tau + 1, 0.0);
                abel_forward(&g, d)
                    .into_iter()
                    .map(|v| v / (4.0 * PI))
                    .collect()
            });
            out.n_sigma = n_tau;
            out
        }
        n => return Err(Error::UnsupportedDimension(n)),
    };
    Ok(BoundaryTrace {
        kind: TraceKind::Pressure,
        data,
    })
}

/// `F u = -8 t ∂_τ² u` on one column.
pub fn filtrate_column(u: &[f64], d_tau: f64) -> Vec<f64> {
    second_derivative(u, d_tau)
        .into_iter()
        .enumerate()
        .map(|(i, v)| -8.0 * (i as f64 * d_tau).sqrt() * v)
        .collect()
}

/// Step two: `v = F u`.
pub fn filtrate(u: &BoundaryTrace) -> Result<BoundaryTrace> {
    if u.kind != TraceKind::Pressure {
        return Err(Error::input("time_reversal", "filtrate expects a pressure trace"));
    }
    check_grid(u.n_tau())?;
    let d = u.d_tau();
    Ok(BoundaryTrace {
        kind: TraceKind::Filtered,
        data: u.data.map_columns(|c| filtrate_column(c, d)),
    })
}

/// `v / t` with the value at `t = 0` extrapolated.
fn over_t(v: &[f64], d: f64, scale: f64) -> Vec<f64> {
    let mut c: Vec<f64> = v
        .iter()
        .enumerate()
        .map(|(i, x)| if i == 0 { 0.0 } else { scale * x / (i as f64 * d).sqrt() })
        .collect();
    c[0] = extrapolate_to_origin(c[1], c[2], c[3]);
    c
}

/// Column of the refocused field as a function of `|x - ξ|^2`, tabulated on
/// the trace grid.
pub fn retransmit_column(v: &[f64], d_tau: f64, dim: usize) -> Vec<f64> {
    match dim {
        3 => over_t(v, d_tau, 1.0 / (4.0 * PI)),
        2 => {
            let w = over_t(v, d_tau, 0.5);
            let n = w.len() - 1;
            let big = n as f64 * d_tau;
            let mut q = abel_backward(&w, d_tau);
            // beyond the horizon the filtered trace decays like tau^{-5/2}
            for (i, qi) in q.iter_mut().enumerate() {
                let s2 = i as f64 * d_tau;
                *qi += w[n] * big * tail_factor(big, s2.min(big * (1.0 - 1e-12)));
                *qi /= 2.0 * PI;
            }
            q
        }
        n => panic!("dimension {n}"),
    }
}

fn retransmit_columns(v: &BoundaryTrace) -> Vec<Vec<f64>> {
    let (d, dim) = (v.d_tau(), v.data.dim);
    v.data
        .centers
        .par_iter()
        .map(|c| retransmit_column(&c.values, d, dim))
        .collect()
}

/// Step three: the refocused field `g` on the grid. Cells outside the
/// cavity are zero and flagged.
pub fn retransmit(v: &BoundaryTrace, p: &Polynomial, spec: &GridSpec) -> Result<Reconstruction> {
    if v.kind != TraceKind::Filtered {
        return Err(Error::input("time_reversal", "retransmit expects a filtered trace"));
    }
    check_grid(v.n_tau())?;
    let cols = retransmit_columns(v);
    backproject(
        &v.data,
        &cols,
        p,
        spec,
        1.0,
        false,
        Interpolation::Cubic,
        v.data.sigma_max(),
    )
}

/// All four steps: `f = -2 p g`.
pub fn tr_reconstruct(
    s: &Sinogram,
    p: &Polynomial,
    spec: &GridSpec,
    horizon: Option<f64>,
) -> Result<Reconstruction> {
    let v = filtrate(&transmit(s, horizon)?)?;
    let cols = retransmit_columns(&v);
    backproject(
        &v.data,
        &cols,
        p,
        spec,
        -2.0,
        true,
        Interpolation::Cubic,
        v.data.sigma_max(),
    )
}
