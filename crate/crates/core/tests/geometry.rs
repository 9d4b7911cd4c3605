mod common;

use std::f64::consts::PI;

use cavity::geometry::{
    cavity_mask, extract_ovals, is_oscillatory_at, leray_integrate, ray_roots,
    residue_identity_defect, unit_sphere_area, Degeneracy, Verdict, ROOT_TOL,
};
use cavity::presets;
use cavity::{Error, GridSpec, Polynomial, QuadratureRule};
use common::{norm, random_unit, rng};

fn xy_minus_one() -> Polynomial {
    Polynomial::new(2, [([1, 1, 0], 1.0), ([0, 0, 0], -1.0)]).unwrap()
}

#[test]
fn ray_root_examples() {
    let d6 = presets::degree_six().p;
    let pr = ray_roots(&d6, &[0.0, 0.0], &[1.0, 0.0], ROOT_TOL).unwrap();
    let want = [1.0616, 1.4142, 2.9788];
    assert_eq!(pr.roots.len(), 6);
    for k in 1..=3 {
        assert!((pr.branch(k as i32).unwrap() - want[k - 1]).abs() < 1e-4);
        assert!((pr.branch(-(k as i32)).unwrap() + want[k - 1]).abs() < 1e-4);
    }
    // derivative signs alternate along simple roots
    assert!(pr.derivs.windows(2).all(|w| w[0] * w[1] < 0.0));

    let c = presets::circle().p;
    let pr = ray_roots(&c, &[0.0, 0.0], &[0.6, 0.8], ROOT_TOL).unwrap();
    assert!((pr.roots[0] + 1.0).abs() < 1e-14 && (pr.roots[1] - 1.0).abs() < 1e-14);

    let pr = ray_roots(&xy_minus_one(), &[0.0, 0.0], &[1.0, 0.0], ROOT_TOL).unwrap();
    assert_eq!(pr.degeneracy, Some(Degeneracy::DegreeDrop));

    assert!(matches!(
        ray_roots(&c, &[1.0, 0.0], &[1.0, 0.0], ROOT_TOL),
        Err(Error::BasePointOnZero { .. })
    ));
}

#[test]
fn antipodal_symmetry() {
    let mut r = rng(11);
    for pr in [presets::degree_six(), presets::crystal(), presets::hypotrochoid()] {
        for _ in 0..50 {
            let w = random_unit(&mut r, pr.p.dim());
            let neg: Vec<f64> = w.iter().map(|v| -v).collect();
            let a = ray_roots(&pr.p, &pr.point, &w, ROOT_TOL).unwrap();
            let b = ray_roots(&pr.p, &pr.point, &neg, ROOT_TOL).unwrap();
            if a.degeneracy.is_some() || b.degeneracy.is_some() {
                continue;
            }
            let mu = a.roots.len() as i32 / 2;
            for k in 1..=mu {
                assert!((b.branch(k).unwrap() + a.branch(-k).unwrap()).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn oscillation_verdicts() {
    let d6 = presets::degree_six();
    let rule = QuadratureRule::half_circle(360).unwrap();
    assert!(is_oscillatory_at(&d6.p, &d6.point, &rule).unwrap().is_oscillatory());
    let h = presets::hyperbola();
    assert!(is_oscillatory_at(&h.p, &h.point, &rule).unwrap().is_oscillatory());
    match is_oscillatory_at(&xy_minus_one(), &[0.0, 0.0], &rule).unwrap() {
        Verdict::Counterexample { omega } => assert!(omega[0] * omega[1] < 0.0),
        v => panic!("expected a counterexample, got {v:?}"),
    }
    assert!(is_oscillatory_at(&d6.p, &[1.0616, 0.0], &rule).is_ok());
    assert!(is_oscillatory_at(&presets::circle().p, &[1.0, 0.0], &rule).is_err());
}

#[test]
fn circle_mask_is_the_disk() {
    let c = presets::circle().p;
    let spec = GridSpec::cube(2, 2.0, 64).unwrap();
    let m = cavity_mask(&c, &spec, &QuadratureRule::half_circle(64).unwrap()).unwrap();
    let h = spec.spacing(0);
    for (f, v) in m.grid.values.iter().enumerate() {
        let r = norm(&spec.point(f));
        if r < 1.0 - h {
            assert_eq!(*v, 1.0);
        }
        if r > 1.0 + h {
            assert_eq!(*v, 0.0);
        }
    }
    assert_eq!(m.convexity_violations(2000), 0);
}

#[test]
fn degree_six_mask_bounds() {
    let p = presets::degree_six().p;
    let spec = GridSpec::cube(2, 1.5, 60).unwrap();
    let m = cavity_mask(&p, &spec, &QuadratureRule::half_circle(90).unwrap()).unwrap();
    for (f, v) in m.grid.values.iter().enumerate() {
        let r = norm(&spec.point(f));
        if *v == 1.0 {
            assert!(r < 1.07, "marked cell at radius {r}");
        }
        if r < 0.9 {
            assert_eq!(*v, 1.0, "unmarked cell at radius {r}");
        }
    }
    assert_eq!(m.convexity_violations(2000), 0);
}

#[test]
fn hyperbola_mask_right_box() {
    let p = presets::hyperbola().p;
    let spec = GridSpec::new(&[1.0, -1.0], &[3.0, 1.0], &[40, 40]).unwrap();
    let m = cavity_mask(&p, &spec, &QuadratureRule::half_circle(90).unwrap()).unwrap();
    assert!(m.marked() > 0);
    assert_eq!(m.convexity_violations(2000), 0);
}

#[test]
fn oval_clouds() {
    let c = presets::circle();
    let ov = extract_ovals(&c.p, &c.point, &QuadratureRule::half_circle(90).unwrap()).unwrap();
    assert_eq!(ov.clouds.len(), 1);
    assert!(ov.clouds[0].iter().all(|x| (norm(x) - 1.0).abs() < 1e-9));

    let d6 = presets::degree_six();
    let ov = extract_ovals(&d6.p, &d6.point, &QuadratureRule::half_circle(180).unwrap()).unwrap();
    assert_eq!(ov.clouds.len(), 3);
    assert!(ov.nested);
    let radii: Vec<f64> = ov.clouds.iter().map(|c| norm(&c[0])).collect();
    assert!(radii[0] < radii[1] && radii[1] < radii[2]);

    let h = presets::hypotrochoid();
    let ov = extract_ovals(&h.p, &h.point, &QuadratureRule::half_circle(180).unwrap()).unwrap();
    assert_eq!(ov.clouds.len(), 2);
    assert!(ov.nested);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ovals.csv");
    ov.write_csv(&path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().next().unwrap(), "x,y,oval");
    assert_eq!(text.lines().count(), 1 + ov.clouds.iter().map(Vec::len).sum::<usize>());
}

#[test]
fn leray_examples() {
    let c = presets::circle();
    let rule = QuadratureRule::half_circle(64).unwrap();
    let v = leray_integrate(&c.p, &c.point, |x| 1.0 / norm(x), &rule).unwrap();
    assert!((v - PI).abs() < 1e-12);
}

fn contour_leray(p: &Polynomial, g: impl Fn(&[f64]) -> f64, segs: &[common::Segment]) -> (f64, f64) {
    let (mut signed, mut unsigned) = (0.0, 0.0);
    for s in segs {
        let y = s.mid();
        let grad = p.gradient(&y).unwrap();
        let radial = grad[0] * y[0] + grad[1] * y[1];
        let term = g(&y) * s.len() / norm(&grad);
        signed += radial.signum() * term;
        unsigned += term.abs();
    }
    (signed, unsigned)
}

#[test]
fn leray_measure_matches_marching_squares() {
    // ∫_Z g dξ/dp against the signed contour integral of g/|∇p|
    let d6 = presets::degree_six();
    let rule = QuadratureRule::half_circle(720).unwrap();
    let segs = common::marching_squares(&d6.p, -3.2, 3.2, 4000);

    // low-degree polynomial g: the residues cancel
    let g = |x: &[f64]| 1.0 + x[0] * x[0] + 0.5 * x[1];
    let v = leray_integrate(&d6.p, &d6.point, g, &rule).unwrap();
    let (oracle, unsigned) = contour_leray(&d6.p, g, &segs);
    assert!(v.abs() < 1e-12 * unsigned);
    assert!(oracle.abs() < 1e-5 * unsigned);

    let g = |x: &[f64]| (0.7 * x[0] - 0.2 * x[1]).exp();
    let v = leray_integrate(&d6.p, &d6.point, g, &rule).unwrap();
    let (oracle, unsigned) = contour_leray(&d6.p, g, &segs);
    assert!(oracle.abs() > 1e-2 * unsigned, "{oracle} / {unsigned}");
    assert!((v - oracle).abs() < 1e-5 * unsigned, "{v} vs {oracle}");
}

#[test]
fn unit_distance_kernel_fails_off_centre() {
    // the |ξ - x|^{-1} kernel reproduces -1/(2p) only at the centre
    let c = presets::circle();
    let rule = QuadratureRule::half_circle(512).unwrap();
    let at = |x: [f64; 2]| {
        leray_integrate(&c.p, &c.point, |xi| 1.0 / norm(&[xi[0] - x[0], xi[1] - x[1]]), &rule).unwrap()
            / unit_sphere_area(2)
    };
    let centre = at([0.0, 0.0]);
    assert!((centre - 0.5).abs() < 1e-12);
    let off = at([0.5, 0.0]);
    let want = -1.0 / (2.0 * c.p.eval(&[0.5, 0.0]).unwrap());
    assert!((off - want).abs() > 0.1 * want);
}

#[test]
fn residue_examples() {
    let c = presets::circle();
    assert!(residue_identity_defect(&c.p, &c.point, &[0.6, 0.8]).unwrap() < 1e-15);
    let h = presets::hyperbola();
    assert!(residue_identity_defect(&h.p, &h.point, &[0.0, 1.0]).unwrap() < 1e-12);
    let d6 = presets::degree_six();
    let mut r = rng(12);
    for a in common::cavity_points(&d6.p, &d6.point, 0.9, 0.05, 20, 12) {
        let w = random_unit(&mut r, 2);
        assert!(residue_identity_defect(&d6.p, &a, &w).unwrap() < 1e-9);
    }
}

#[test]
fn rule_exactness() {
    let r = QuadratureRule::half_circle(40).unwrap();
    assert!((r.total_weight() - PI).abs() < 1e-10);
    // even trigonometric polynomials in the angle
    for k in 0..20 {
        let s: f64 = (0..r.len())
            .map(|j| {
                let w = r.node(j);
                r.weight(j) * (2.0 * k as f64 * w[1].atan2(w[0])).cos()
            })
            .sum();
        let exact = if k == 0 { PI } else { 0.0 };
        assert!((s - exact).abs() < 1e-10, "k={k}: {s}");
    }
    let r = QuadratureRule::hemisphere(10, 20).unwrap();
    assert!((r.total_weight() - 2.0 * PI).abs() < 1e-10);
    let z4: f64 = (0..r.len()).map(|j| r.weight(j) * r.node(j)[2].powi(4)).sum();
    assert!((z4 - 2.0 * PI / 5.0).abs() < 1e-12);
    let xy2: f64 = (0..r.len())
        .map(|j| {
            let w = r.node(j);
            r.weight(j) * w[0] * w[0] * w[1] * w[1]
        })
        .sum();
    assert!((xy2 - 2.0 * PI / 15.0).abs() < 1e-12);
}
