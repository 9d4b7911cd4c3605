//! Small numerical kernels shared by the filtering and back-projection code:
//! compensated summation, fourth-order finite differences on a uniform grid,
//! and local Lagrange interpolation.

/// Neumaier compensated accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct Accumulator {
    sum: f64,
    comp: f64,
}

impl Accumulator {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    let mut acc = Accumulator::new();
    for x in iter {
        acc.add(x);
    }
    acc.value()
}

/// First derivative, fourth order, one-sided five-point stencils in the two
/// cells next to each boundary. Needs at least 6 samples.
pub fn first_derivative(y: &[f64], h: f64) -> Vec<f64> {
    let n = y.len();
    assert!(n >= 6, "first_derivative needs at least 6 samples");
    let s = 1.0 / (12.0 * h);
    let mut d = vec![0.0; n];
    d[0] = (-25.0 * y[0] + 48.0 * y[1] - 36.0 * y[2] + 16.0 * y[3] - 3.0 * y[4]) * s;
    d[1] = (-3.0 * y[0] - 10.0 * y[1] + 18.0 * y[2] - 6.0 * y[3] + y[4]) * s;
    for i in 2..n - 2 {
        d[i] = (y[i - 2] - 8.0 * y[i - 1] + 8.0 * y[i + 1] - y[i + 2]) * s;
    }
    let l = n - 1;
    d[l - 1] = (3.0 * y[l] + 10.0 * y[l - 1] - 18.0 * y[l - 2] + 6.0 * y[l - 3] - y[l - 4]) * s;
    d[l] = (25.0 * y[l] - 48.0 * y[l - 1] + 36.0 * y[l - 2] - 16.0 * y[l - 3] + 3.0 * y[l - 4]) * s;
    d
}

/// Second derivative, fourth order, one-sided six-point stencils at the
/// boundaries. Needs at least 6 samples.
pub fn second_derivative(y: &[f64], h: f64) -> Vec<f64> {
    let n = y.len();
    assert!(n >= 6, "second_derivative needs at least 6 samples");
    let s = 1.0 / (12.0 * h * h);
    let mut d = vec![0.0; n];
    d[0] = (45.0 * y[0] - 154.0 * y[1] + 214.0 * y[2] - 156.0 * y[3] + 61.0 * y[4]
        - 10.0 * y[5])
        * s;
    d[1] = (10.0 * y[0] - 15.0 * y[1] - 4.0 * y[2] + 14.0 * y[3] - 6.0 * y[4] + y[5]) * s;
    for i in 2..n - 2 {
        d[i] = (-y[i - 2] + 16.0 * y[i - 1] - 30.0 * y[i] + 16.0 * y[i + 1] - y[i + 2]) * s;
    }
    let l = n - 1;
    d[l - 1] = (10.0 * y[l] - 15.0 * y[l - 1] - 4.0 * y[l - 2] + 14.0 * y[l - 3] - 6.0 * y[l - 4]
        + y[l - 5])
        * s;
    d[l] = (45.0 * y[l] - 154.0 * y[l - 1] + 214.0 * y[l - 2] - 156.0 * y[l - 3]
        + 61.0 * y[l - 4]
        - 10.0 * y[l - 5])
        * s;
    d
}

/// Value at node 0 from the quadratic through nodes 1, 2, 3.
#[inline]
pub fn extrapolate_to_origin(y1: f64, y2: f64, y3: f64) -> f64 {
    3.0 * y1 - 3.0 * y2 + y3
}

/// Interpolation order used when sampling tabulated columns between nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Interpolation {
    Linear,
    #[default]
    Cubic,
}

/// Samples a column tabulated at `x_i = i * h` at an arbitrary abscissa.
///
/// Outside `[0, (n-1) h]` the end interval is extended polynomially; callers
/// are expected to stay inside.
#[inline]
pub fn interpolate(y: &[f64], h: f64, x: f64, order: Interpolation) -> f64 {
    let n = y.len();
    let u = x / h;
    match order {
        Interpolation::Linear => {
            let i = (u.floor() as isize).clamp(0, n as isize - 2) as usize;
            let f = u - i as f64;
            y[i] * (1.0 - f) + y[i + 1] * f
        }
        Interpolation::Cubic => {
            let i = (u.floor() as isize).clamp(1, n as isize - 3) as usize;
            let f = u - i as f64;
            // Lagrange basis on nodes i-1, i, i+1, i+2 at offset f from node i.
            let fm = f + 1.0;
            let f1 = f - 1.0;
            let f2 = f - 2.0;
            let w0 = -f * f1 * f2 / 6.0;
            let w1 = fm * f1 * f2 / 2.0;
            let w2 = -fm * f * f2 / 2.0;
            let w3 = fm * f * f1 / 6.0;
            w0 * y[i - 1] + w1 * y[i] + w2 * y[i + 1] + w3 * y[i + 2]
        }
    }
}

/// Derivative of the cubic Lagrange interpolant used by [`interpolate`].
pub fn interpolate_derivative(y: &[f64], h: f64, x: f64) -> f64 {
    let n = y.len();
    let u = x / h;
    let i = (u.floor() as isize).clamp(1, n as isize - 3) as usize;
    let f = u - i as f64;
    let fm = f + 1.0;
    let f1 = f - 1.0;
    let f2 = f - 2.0;
    let d0 = -(f1 * f2 + f * f2 + f * f1) / 6.0;
    let d1 = (f1 * f2 + fm * f2 + fm * f1) / 2.0;
    let d2 = -(f * f2 + fm * f2 + fm * f) / 2.0;
    let d3 = (f * f1 + fm * f1 + fm * f) / 6.0;
    (d0 * y[i - 1] + d1 * y[i] + d2 * y[i + 1] + d3 * y[i + 2]) / h
}
