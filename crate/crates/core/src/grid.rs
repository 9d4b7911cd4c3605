//! Axis-aligned sampled scalar fields and their file formats.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// Cell-centred sampling of a box: along axis `i` the samples sit at
/// `lo[i] + (k + 1/2) (hi[i] - lo[i]) / n[i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub dim: usize,
    pub lo: [f64; 3],
    pub hi: [f64; 3],
    pub n: [usize; 3],
}

impl GridSpec {
    pub fn new(lo: &[f64], hi: &[f64], n: &[usize]) -> Result<Self> {
        let dim = lo.len();
        if dim != 2 && dim != 3 {
            return Err(Error::UnsupportedDimension(dim));
        }
        if hi.len() != dim || n.len() != dim {
            return Err(Error::input("grid", "box bounds and resolution disagree in dimension"));
        }
        let mut spec = GridSpec {
            dim,
            lo: [0.0; 3],
            hi: [0.0; 3],
            n: [1; 3],
        };
        for i in 0..dim {
            if !(lo[i].is_finite() && hi[i].is_finite() && lo[i] < hi[i]) {
                return Err(Error::input("grid", format!("empty or invalid range on axis {i}")));
            }
            if n[i] == 0 {
                return Err(Error::input("grid", "resolution must be positive"));
            }
            spec.lo[i] = lo[i];
            spec.hi[i] = hi[i];
            spec.n[i] = n[i];
        }
        Ok(spec)
    }

    /// The cube `[-half, half]^dim` with `res` cells per axis.
    pub fn cube(dim: usize, half: f64, res: usize) -> Result<Self> {
        Self::new(&vec![-half; dim], &vec![half; dim], &vec![res; dim])
    }

    pub fn len(&self) -> usize {
        self.n[..self.dim].iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        (self.hi[axis] - self.lo[axis]) / self.n[axis] as f64
    }

    /// Multi-index of the flat index, axis 0 fastest.
    pub fn index(&self, flat: usize) -> [usize; 3] {
        let mut r = flat;
        let mut out = [0; 3];
        for i in 0..self.dim {
            out[i] = r % self.n[i];
            r /= self.n[i];
        }
        out
    }

    pub fn flat(&self, idx: &[usize]) -> usize {
        let mut f = 0;
        for i in (0..self.dim).rev() {
            f = f * self.n[i] + idx[i];
        }
        f
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        let idx = self.index(flat);
        (0..self.dim)
            .map(|i| self.lo[i] + (idx[i] as f64 + 0.5) * self.spacing(i))
            .collect()
    }

    pub fn points(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        (0..self.len()).map(|f| self.point(f))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalarGrid {
    pub spec: GridSpec,
    pub values: Vec<f64>,
}

impl ScalarGrid {
    pub fn zeros(spec: GridSpec) -> Self {
        let n = spec.len();
        ScalarGrid {
            spec,
            values: vec![0.0; n],
        }
    }

    pub fn from_fn<F: Fn(&[f64]) -> f64>(spec: GridSpec, f: F) -> Self {
        let values = spec.points().map(|x| f(&x)).collect();
        ScalarGrid { spec, values }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `||self - reference|| / ||reference||` in the discrete L2 norm.
    pub fn relative_l2_error(&self, reference: &ScalarGrid) -> f64 {
        assert_eq!(self.values.len(), reference.values.len());
        let mut num = 0.0;
        let mut den = 0.0;
        for (a, b) in self.values.iter().zip(&reference.values) {
            num += (a - b) * (a - b);
            den += b * b;
        }
        (num / den).sqrt()
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(fs::File::create(path)?);
        let s = &self.spec;
        let mut header = format!("# grid {}", s.dim);
        for i in 0..s.dim {
            let _ = write!(header, " {}", s.n[i]);
        }
        for i in 0..s.dim {
            let _ = write!(header, " {}", s.lo[i]);
        }
        for i in 0..s.dim {
            let _ = write!(header, " {}", s.hi[i]);
        }
        writeln!(w, "{header}")?;
        writeln!(w, "{}", if s.dim == 2 { "x,y,value" } else { "x,y,z,value" })?;
        for (f, v) in self.values.iter().enumerate() {
            let x = s.point(f);
            for c in &x {
                write!(w, "{c:.16e},")?;
            }
            writeln!(w, "{v:.16e}")?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let mut lines = text.lines();
        let bad = |msg: &str| Error::input("grid", format!("{}: {msg}", path.display()));
        let header = lines.next().ok_or_else(|| bad("empty file"))?;
        let nums: Vec<&str> = header
            .strip_prefix("# grid")
            .ok_or_else(|| bad("missing grid header"))?
            .split_whitespace()
            .collect();
        let dim: usize = nums
            .first()
            .and_then(|d| d.parse().ok())
            .ok_or_else(|| bad("bad dimension"))?;
        if (dim != 2 && dim != 3) || nums.len() != 1 + 3 * dim {
            return Err(bad("malformed grid header"));
        }
        let n: Vec<usize> = nums[1..1 + dim]
            .iter()
            .map(|s| s.parse().map_err(|_| bad("bad resolution")))
            .collect::<Result<_>>()?;
        let f = |s: &&str| s.parse::<f64>().map_err(|_| bad("bad bound"));
        let lo: Vec<f64> = nums[1 + dim..1 + 2 * dim].iter().map(f).collect::<Result<_>>()?;
        let hi: Vec<f64> = nums[1 + 2 * dim..].iter().map(f).collect::<Result<_>>()?;
        let spec = GridSpec::new(&lo, &hi, &n)?;
        lines.next();
        let mut values = Vec::with_capacity(spec.len());
        for line in lines {
            if line.trim().is_empty() {
                continue;
            }
            let v = line
                .rsplit(',')
                .next()
                .and_then(|s| s.trim().parse::<f64>().ok())
                .ok_or_else(|| bad("bad value"))?;
            values.push(v);
        }
        if values.len() != spec.len() {
            return Err(bad("row count does not match the header"));
        }
        Ok(ScalarGrid { spec, values })
    }

    /// Binary 16-bit PGM of a 2D grid, affinely mapped from `[min, max]`
    /// to `[0, 65535]`, with `min max` written to `<path>.scale`. Row 0 of
    /// the image is the top (largest y).
    pub fn write_pgm16(&self, path: &Path) -> Result<PathBuf> {
        let s = &self.spec;
        if s.dim != 2 {
            return Err(Error::input("grid", "PGM output needs a 2D grid"));
        }
        let lo = self.values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let range = hi - lo;
        let mut buf = format!("P5\n{} {}\n65535\n", s.n[0], s.n[1]).into_bytes();
        for j in (0..s.n[1]).rev() {
            for i in 0..s.n[0] {
                let v = self.values[s.flat(&[i, j])];
                let q = if range > 0.0 {
                    ((v - lo) / range * 65535.0).round().clamp(0.0, 65535.0) as u16
                } else {
                    0
                };
                buf.extend_from_slice(&q.to_be_bytes());
            }
        }
        fs::write(path, buf)?;
        let mut side = path.as_os_str().to_owned();
        side.push(".scale");
        let side = PathBuf::from(side);
        fs::write(&side, format!("{lo:.16e} {hi:.16e}\n"))?;
        Ok(side)
    }
}
