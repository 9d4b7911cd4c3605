//! Built-in geometries. The same polynomials ship as text files under
//! `presets/` in the repository root.

use crate::poly::Polynomial;

#[derive(Clone, Debug)]
pub struct Preset {
    pub name: &'static str,
    pub p: Polynomial,
    /// A point of the cavity.
    pub point: Vec<f64>,
    /// A separator shipped with the geometry, if any.
    pub q: Option<Polynomial>,
}

fn var(dim: usize, i: usize) -> Polynomial {
    Polynomial::variable(dim, i).unwrap()
}

fn c(dim: usize, v: f64) -> Polynomial {
    Polynomial::constant(dim, v).unwrap()
}

pub fn circle() -> Preset {
    Preset {
        name: "circle",
        p: Polynomial::sphere(2, 1.0).unwrap(),
        point: vec![0.0, 0.0],
        q: None,
    }
}

pub fn sphere() -> Preset {
    Preset {
        name: "sphere",
        p: Polynomial::sphere(3, 1.0).unwrap(),
        point: vec![0.0, 0.0, 0.0],
        q: None,
    }
}

/// `(x²+y²)³ - 12(x²+y²)² + 7x²y² + 30(x²+y²) - 20`: three nested ovals.
pub fn degree_six() -> Preset {
    let (x, y) = (var(2, 0), var(2, 1));
    let r = &(&x * &x) + &(&y * &y);
    let xy2 = (&x * &x) * (&y * &y);
    let p = r.pow(3) - r.pow(2).scale(12.0) + xy2.scale(7.0) + r.scale(30.0) - c(2, 20.0);
    Preset {
        name: "degree6",
        p,
        point: vec![0.0, 0.0],
        q: None,
    }
}

/// Quartic hypotrochoid `4(x²+y²)² - 4x³ + 12xy² - 27(x²+y²) + 27` with the
/// separator `4(x²+y²) - 9`.
pub fn hypotrochoid() -> Preset {
    let (x, y) = (var(2, 0), var(2, 1));
    let r = &(&x * &x) + &(&y * &y);
    let p = r.pow(2).scale(4.0) - x.pow(3).scale(4.0) + (&x * &y.pow(2)).scale(12.0)
        - r.scale(27.0)
        + c(2, 27.0);
    let q = r.scale(4.0) - c(2, 9.0);
    Preset {
        name: "hypotrochoid",
        p,
        point: vec![0.0, 0.0],
        q: Some(q),
    }
}

/// Quartic wave surface with principal parameters `(1, 2, 4)`:
/// `(x²+2y²+4z²)|x|² - 6x² - 10y² - 12z² + 8`.
pub fn crystal() -> Preset {
    let (x, y, z) = (var(3, 0), var(3, 1), var(3, 2));
    let (x2, y2, z2) = (&x * &x, &y * &y, &z * &z);
    let r = &(&x2 + &y2) + &z2;
    let s = &(&x2 + &y2.scale(2.0)) + &z2.scale(4.0);
    let p = &s * &r - x2.scale(6.0) - y2.scale(10.0) - z2.scale(12.0) + c(3, 8.0);
    Preset {
        name: "crystal",
        p,
        point: vec![0.0, 0.0, 0.0],
        q: None,
    }
}

/// One branch cavity of the hyperbola `x² - y² - 1`, seen from `(2, 0)`.
pub fn hyperbola() -> Preset {
    let (x, y) = (var(2, 0), var(2, 1));
    Preset {
        name: "hyperbola",
        p: &x * &x - &y * &y - c(2, 1.0),
        point: vec![2.0, 0.0],
        q: None,
    }
}

pub fn all() -> Vec<Preset> {
    vec![circle(), sphere(), degree_six(), hypotrochoid(), crystal(), hyperbola()]
}

pub fn by_name(name: &str) -> Option<Preset> {
    all().into_iter().find(|p| p.name == name)
}
