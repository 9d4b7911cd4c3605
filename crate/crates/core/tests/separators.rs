mod common;

use cavity::geometry::{ray_roots, ROOT_TOL};
use cavity::presets;
use cavity::separator::{euler_separator, sign_pattern_holds, verify_separator, FailureReason};
use cavity::{Polynomial, QuadratureRule};
use common::{random_unit, rng};

fn parse(dim: usize, terms: &[([u32; 3], f64)]) -> Polynomial {
    Polynomial::new(dim, terms.iter().copied()).unwrap()
}

#[test]
fn euler_separator_forms() {
    let s = presets::sphere();
    assert_eq!(euler_separator(&s.p, &s.point).unwrap(), Polynomial::constant(3, 2.0).unwrap());

    let d6 = presets::degree_six();
    let want = parse(
        2,
        &[
            ([4, 0, 0], 24.0),
            ([0, 4, 0], 24.0),
            ([2, 2, 0], 34.0),
            ([2, 0, 0], -120.0),
            ([0, 2, 0], -120.0),
            ([0, 0, 0], 120.0),
        ],
    );
    assert_eq!(euler_separator(&d6.p, &d6.point).unwrap(), want);

    let cr = presets::crystal();
    let want = parse(3, &[([2, 0, 0], 12.0), ([0, 2, 0], 20.0), ([0, 0, 2], 24.0), ([0, 0, 0], -32.0)]);
    assert_eq!(euler_separator(&cr.p, &cr.point).unwrap(), want);
}

#[test]
fn euler_separator_restricts_to_t_dp_minus_mp() {
    let mut r = rng(21);
    for pr in [presets::degree_six(), presets::crystal(), presets::hypotrochoid()] {
        let m = pr.p.degree() as f64;
        for a in common::cavity_points(&pr.p, &pr.point, 0.4, 0.05, 5, 21) {
            let q = euler_separator(&pr.p, &a).unwrap();
            for _ in 0..20 {
                let w = random_unit(&mut r, pr.p.dim());
                let up = pr.p.restrict_to_line(&a, &w).unwrap();
                let uq = q.restrict_to_line(&a, &w).unwrap();
                let dp = up.derivative();
                for t in [-2.0, -0.7, 0.3, 1.1, 2.5] {
                    let want = t * dp.eval(t) - m * up.eval(t);
                    assert!((uq.eval(t) - want).abs() < 1e-9 * (1.0 + want.abs()));
                }
            }
        }
    }
}

#[test]
fn strict_presets_pass() {
    let cases = [
        (presets::degree_six(), QuadratureRule::half_circle(360).unwrap(), None),
        (presets::crystal(), QuadratureRule::hemisphere(16, 32).unwrap(), None),
        (presets::hypotrochoid(), QuadratureRule::half_circle(361).unwrap(), presets::hypotrochoid().q),
    ];
    for (pr, rule, shipped) in cases {
        let q = shipped.unwrap_or_else(|| euler_separator(&pr.p, &pr.point).unwrap());
        let rep = verify_separator(&pr.p, &q, &pr.point, &rule).unwrap();
        assert!(rep.pass, "{}: {:?}", pr.name, rep.failures.first());
        assert!(rep.strict, "{}", pr.name);
        assert_eq!(rep.degree_q + 2, rep.degree_p);
    }
}

#[test]
fn non_strict_sphere_separator() {
    let s = presets::sphere();
    let q = parse(3, &[([1, 0, 0], 1.0), ([0, 0, 0], 2.0)]);
    let rep = verify_separator(&s.p, &q, &s.point, &QuadratureRule::hemisphere(12, 24).unwrap()).unwrap();
    assert!(rep.pass);
    assert!(!rep.strict);
}

#[test]
fn sign_pattern_on_random_rays() {
    let mut r = rng(22);
    let cases = [
        (presets::degree_six(), None),
        (presets::crystal(), None),
        (presets::hypotrochoid(), presets::hypotrochoid().q),
        (presets::sphere(), None),
    ];
    for (pr, shipped) in cases {
        let q = shipped.unwrap_or_else(|| euler_separator(&pr.p, &pr.point).unwrap());
        let mut checked = 0;
        while checked < 100 {
            let w = random_unit(&mut r, pr.p.dim());
            let prof = ray_roots(&pr.p, &pr.point, &w, ROOT_TOL).unwrap();
            if prof.degeneracy.is_some() {
                continue;
            }
            assert!(sign_pattern_holds(&pr.p, &q, &pr.point, &w).unwrap(), "{} along {w:?}", pr.name);
            checked += 1;
        }
    }
}

#[test]
fn failing_candidates() {
    // one zero at radius 2 misses the gap between the two inner ovals
    let d6 = presets::degree_six();
    let q = parse(2, &[([2, 0, 0], 1.0), ([0, 2, 0], 1.0), ([0, 0, 0], -4.0)]);
    let rep = verify_separator(&d6.p, &q, &d6.point, &QuadratureRule::half_circle(90).unwrap()).unwrap();
    assert!(!rep.pass);
    assert!(rep.failures.iter().all(|f| f.reason == FailureReason::Interleaving));
    assert_eq!(rep.failures.len() + rep.ambiguous + rep.skipped, 90, "{} {}", rep.ambiguous, rep.skipped);
    assert!(rep.failures.len() >= 80);

    // zero inside the cavity
    let s = presets::sphere();
    let q = parse(3, &[([1, 0, 0], 1.0), ([0, 0, 0], 0.5)]);
    let rep = verify_separator(&s.p, &q, &s.point, &QuadratureRule::hemisphere(8, 16).unwrap()).unwrap();
    assert!(!rep.pass);
    assert!(rep.failures.iter().any(|f| f.reason == FailureReason::CentralIntervalZero));

    // degree too high
    let c = presets::circle();
    let q = parse(2, &[([2, 0, 0], 1.0), ([0, 0, 0], 3.0)]);
    let rep = verify_separator(&c.p, &q, &c.point, &QuadratureRule::half_circle(16).unwrap()).unwrap();
    assert!(rep.failures.iter().any(|f| f.reason == FailureReason::Degree));
}

#[test]
fn report_json_keys() {
    let d6 = presets::degree_six();
    let q = euler_separator(&d6.p, &d6.point).unwrap();
    let rep = verify_separator(&d6.p, &q, &d6.point, &QuadratureRule::half_circle(32).unwrap()).unwrap();
    let v = serde_json::to_value(&rep).unwrap();
    for key in [
        "strict",
        "pass",
        "degree_p",
        "degree_q",
        "directions_checked",
        "skipped",
        "ambiguous",
        "failures",
    ] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["directions_checked"], 32);
    assert_eq!(v["pass"], true);
}

#[test]
fn dimension_mismatch() {
    let s = presets::sphere();
    let q = Polynomial::constant(2, 1.0).unwrap();
    assert!(verify_separator(&s.p, &q, &s.point, &QuadratureRule::hemisphere(4, 8).unwrap()).is_err());
}
