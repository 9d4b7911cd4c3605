//! Filtered back projection over the Leray measure of the zero set.
//!
//! With `G = Rf/r` sampled on the uniform `sigma = r^2` grid:
//!
//! * `n = 3`: `f(x) = c_3 p(x) Σ w (2∂_σ)^2 G (|x - ξ|^2)`
//! * `n = 2`: `f(x) = c_2 p(x) Σ w PV ∫ (2∂_σ G)(σ) / (|x - ξ|^2 - σ) dσ`
//!
//! where `w` is the quadrature weight times the Leray weight of the centre
//! `ξ`. The constants are `c_3 = 1/(4π²)` and `c_2 = -1/(2π²)`; see
//! [`default_normalization`].

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::forward::Sinogram;
use crate::geometry::segment_clear;
use crate::grid::{GridSpec, ScalarGrid};
use crate::numeric::{
    extrapolate_to_origin, first_derivative, interpolate, second_derivative, Accumulator,
    Interpolation,
};
use crate::poly::Polynomial;

/// Smallest number of sigma intervals the filters accept.
pub const MIN_SIGMA_INTERVALS: usize = 9;

/// Normalization that reproduces `f` with the attraction-free orientation
/// used throughout the crate: `1/(4π²)` for `n = 3`, `-1/(2π²)` for `n = 2`.
pub fn default_normalization(n: usize) -> f64 {
    match n {
        3 => 1.0 / (4.0 * PI * PI),
        2 => -1.0 / (2.0 * PI * PI),
        _ => panic!("dimension {n}"),
    }
}

#[derive(Clone, Debug, Default)]
pub struct ReconstructionConfig {
    /// Overrides [`default_normalization`].
    pub normalization: Option<f64>,
    /// Half-width of the excluded band at either end of the sigma range.
    /// Defaults to `2 Δσ`.
    pub pv_epsilon: Option<f64>,
    pub interpolation: Interpolation,
}

impl ReconstructionConfig {
    pub fn normalization_for(&self, n: usize) -> f64 {
        self.normalization.unwrap_or_else(|| default_normalization(n))
    }
}

/// `Rf/r` on the sigma grid, with the value at `sigma = 0` extrapolated.
pub fn divide_by_radius(col: &[f64], d_sigma: f64) -> Vec<f64> {
    let mut g: Vec<f64> = col
        .iter()
        .enumerate()
        .map(|(i, v)| if i == 0 { 0.0 } else { v / (i as f64 * d_sigma).sqrt() })
        .collect();
    if g.len() >= 4 {
        g[0] = extrapolate_to_origin(g[1], g[2], g[3]);
    }
    g
}

fn check_grid(n_sigma: usize) -> Result<()> {
    if n_sigma < MIN_SIGMA_INTERVALS {
        return Err(Error::GridTooCoarse { n_sigma });
    }
    Ok(())
}

/// Applies `(2∂_σ)^{n-1}` to `Rf/r`. For `n = 3` the value at `σ = 0` is
/// extrapolated from the interior, as the time-reversal retransmission does.
pub fn filter_column(col: &[f64], d_sigma: f64, n: usize) -> Vec<f64> {
    let g = divide_by_radius(col, d_sigma);
    match n {
        2 => first_derivative(&g, d_sigma).into_iter().map(|v| 2.0 * v).collect(),
        3 => {
            let mut h: Vec<f64> = second_derivative(&g, d_sigma).into_iter().map(|v| 4.0 * v).collect();
            h[0] = extrapolate_to_origin(h[1], h[2], h[3]);
            h
        }
        _ => panic!("dimension {n}"),
    }
}

pub fn radial_filter(s: &Sinogram) -> Result<Sinogram> {
    check_grid(s.n_sigma)?;
    let (d, n) = (s.d_sigma, s.dim);
    Ok(s.map_columns(|c| filter_column(c, d, n)))
}

/// Regular part of the principal value at `s2`, trapezoid rule, plus the
/// analytic log term. `hs` and `dhs` are `h(s2)` and `h'(s2)`.
fn pv_core(h: &[f64], d_sigma: f64, s2: f64, hs: f64, dhs: f64) -> f64 {
    let n = h.len() - 1;
    let sigma_max = n as f64 * d_sigma;
    let mut acc = Accumulator::new();
    for (i, hi) in h.iter().enumerate() {
        let sig = i as f64 * d_sigma;
        let den = s2 - sig;
        let v = if den.abs() <= 1e-12 * d_sigma {
            -dhs
        } else {
            (hi - hs) / den
        };
        let wt = if i == 0 || i == n { 0.5 } else { 1.0 };
        acc.add(wt * v);
    }
    acc.value() * d_sigma + hs * (s2 / (sigma_max - s2)).ln()
}

/// `PV ∫_0^{Σ} h(σ)/(s² - σ) dσ` for a column tabulated at `σ_i = i Δσ`.
pub fn pv_transform(h: &[f64], d_sigma: f64, s2: f64, epsilon: f64) -> Result<f64> {
    let sigma_max = (h.len() - 1) as f64 * d_sigma;
    if s2 < epsilon || s2 > sigma_max - epsilon {
        return Err(Error::PvBoundary { s2, epsilon });
    }
    let hs = interpolate(h, d_sigma, s2, Interpolation::Cubic);
    let dhs = crate::numeric::interpolate_derivative(h, d_sigma, s2);
    Ok(pv_core(h, d_sigma, s2, hs, dhs))
}

/// Principal values at every interior node; the two end values are
/// extrapolated quadratically so the table can be interpolated anywhere.
pub fn pv_table(h: &[f64], d_sigma: f64) -> Vec<f64> {
    let n = h.len() - 1;
    let dh = first_derivative(h, d_sigma);
    let mut t = vec![0.0; n + 1];
    for i in 1..n {
        t[i] = pv_core(h, d_sigma, i as f64 * d_sigma, h[i], dh[i]);
    }
    t[0] = extrapolate_to_origin(t[1], t[2], t[3]);
    t[n] = extrapolate_to_origin(t[n - 1], t[n - 2], t[n - 3]);
    t
}

/// Output of a reconstruction: the grid, and a flag per cell that lies
/// outside the cavity (those cells are zero).
#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub grid: ScalarGrid,
    pub outside: Vec<bool>,
}

impl Reconstruction {
    pub fn outside_count(&self) -> usize {
        self.outside.iter().filter(|&&o| o).count()
    }
}

/// Sums `Σ weight · column(|x - ξ|²)` over all centres at every cell in the
/// cavity and multiplies by `scale`, and by `p(x)` when `with_p` is set.
/// Columns are tabulated on the sinogram sigma grid.
pub(crate) fn backproject(
    s: &Sinogram,
    columns: &[Vec<f64>],
    p: &Polynomial,
    spec: &GridSpec,
    scale: f64,
    with_p: bool,
    order: Interpolation,
    sigma_limit: f64,
) -> Result<Reconstruction> {
    if spec.dim != s.dim || p.dim() != s.dim {
        return Err(Error::DimensionMismatch {
            expected: s.dim,
            got: spec.dim,
        });
    }
    let d = s.d_sigma;
    let cells: Vec<Result<(f64, bool)>> = (0..spec.len())
        .into_par_iter()
        .map(|f| {
            let x = spec.point(f);
            if !segment_clear(p, &s.base, &x) {
                return Ok((0.0, true));
            }
            let mut acc = Accumulator::new();
            for (c, col) in s.centers.iter().zip(columns) {
                let s2: f64 = x.iter().zip(&c.point).map(|(u, v)| (u - v) * (u - v)).sum();
                if s2 > sigma_limit {
                    return Err(Error::PvBoundary {
                        s2,
                        epsilon: s.sigma_max() - sigma_limit,
                    });
                }
                acc.add(c.weight() * interpolate(col, d, s2, order));
            }
            let px = if with_p { p.eval_unchecked(&x) } else { 1.0 };
            Ok((scale * px * acc.value(), false))
        })
        .collect();
    let mut values = Vec::with_capacity(cells.len());
    let mut outside = Vec::with_capacity(cells.len());
    for c in cells {
        let (v, o) = c?;
        values.push(v);
        outside.push(o);
    }
    Ok(Reconstruction {
        grid: ScalarGrid {
            spec: spec.clone(),
            values,
        },
        outside,
    })
}

pub fn reconstruct(
    s: &Sinogram,
    p: &Polynomial,
    spec: &GridSpec,
    cfg: &ReconstructionConfig,
) -> Result<Reconstruction> {
    check_grid(s.n_sigma)?;
    let filtered = radial_filter(s)?;
    let c = cfg.normalization_for(s.dim);
    let eps = cfg.pv_epsilon.unwrap_or(2.0 * s.d_sigma);
    match s.dim {
        3 => {
            let cols: Vec<Vec<f64>> = filtered.centers.into_iter().map(|c| c.values).collect();
            backproject(s, &cols, p, spec, c, true, cfg.interpolation, s.sigma_max())
        }
        2 => {
            let cols: Vec<Vec<f64>> = filtered
                .centers
                .par_iter()
                .map(|c| pv_table(&c.values, s.d_sigma))
                .collect();
            backproject(s, &cols, p, spec, c, true, cfg.interpolation, s.sigma_max() - eps)
        }
        n => Err(Error::UnsupportedDimension(n)),
    }
}
