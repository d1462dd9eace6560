mod common;

use common::{riccati_projective, rk4, rng};
use lieflow_core::superposition::PlanarTerms;
use lieflow_core::{
    cross_ratio, fit_constants, superpose_affine, superpose_linear, superpose_planar_sl2,
    superpose_riccati, Error, ProjectivePoint, SuperpositionRule,
};
use num_complex::Complex64;
use rand::Rng;

// Independent transcription of the planar rule, one bracket per line.
fn planar_literal(s1: [f64; 2], s2: [f64; 2], s3: [f64; 2], k1: f64, k2: f64) -> (f64, f64, f64) {
    let ([x1, y1], [x2, y2], [x3, y3]) = (s1, s2, s3);
    let p = |a: f64| a.powi(2);
    let kk = p(k1) + p(k2);
    let nx = x1 * (p(x2 - x3) + p(y2 - y3))
        + k1 * (p(x2) * x3 + (x3 - x2) * p(x1) + p(y1 - y2) * x3
            - x2 * (p(x3) + p(y1 - y3))
            - x1 * (p(x2 - x3) + p(y2 - y3)))
        + k2 * (p(x3) * (y2 - y1)
            + p(x2) * (y1 - y3)
            + (y3 - y2) * (p(x1) + (y1 - y2) * (y1 - y3)))
        + kk * x2 * (p(x1 - x3) + p(y1 - y3));
    let ny = y1 * (p(x2 - x3) + p(y2 - y3))
        + k1 * (p(x2) * (y3 - y1) - p(x3) * (y1 + y2)
            + 2.0 * x2 * (x3 * y1 - x1 * y3)
            + 2.0 * x1 * x3 * y2
            - (p(x1) + (y1 + y2) * (y1 - y3)) * (y2 - y3))
        + k2 * (p(x1) * (x2 - x3) + p(x2) * x3 + x3 * (p(y2) - p(y1))
            - x2 * (p(x3) + p(y3) - p(y1))
            + x1 * (p(x3) - p(x2) + p(y3) - p(y2)))
        + kk * y2 * (p(x1 - x3) + p(y1 - y3));
    let d = p(x2 - x3) + p(y2 - y3) - 2.0 * k1 * ((x1 - x3) * (x2 - x3) + (y1 - y3) * (y2 - y3))
        + 2.0 * k2 * (x3 * (y2 - y1) + x2 * (y1 - y3) + x1 * (y3 - y2))
        + kk * (p(x1 - x3) + p(y1 - y3));
    (nx, ny, d)
}

// On z = x + iy the planar system is a complex Riccati equation, so the
// rule is the complex cross-ratio formula with k = k1 + i k2.
fn planar_mobius(s1: [f64; 2], s2: [f64; 2], s3: [f64; 2], k1: f64, k2: f64) -> [f64; 2] {
    let z = |s: [f64; 2]| Complex64::new(s[0], s[1]);
    let (z1, z2, z3, k) = (z(s1), z(s2), z(s3), Complex64::new(k1, k2));
    let w = (z1 * (z3 - z2) + k * z2 * (z1 - z3)) / ((z3 - z2) + k * (z1 - z3));
    [w.re, w.im]
}

fn random_point(r: &mut impl Rng) -> [f64; 2] {
    [r.random_range(-2.0..2.0), r.random_range(-2.0..2.0)]
}

#[test]
fn planar_terms_match_literal_transcription() {
    let mut r = rng(11);
    for _ in 0..200 {
        let (s1, s2, s3) = (
            random_point(&mut r),
            random_point(&mut r),
            random_point(&mut r),
        );
        let (k1, k2) = (r.random_range(-3.0..3.0), r.random_range(-3.0..3.0));
        let (a, b, c) = PlanarTerms::new(s1, s2, s3).at(k1, k2);
        let (x, y, z) = planar_literal(s1, s2, s3, k1, k2);
        let scale = 1.0 + x.abs() + y.abs() + z.abs();
        assert!((a - x).abs() + (b - y).abs() + (c - z).abs() < 1e-12 * scale);
    }
}

#[test]
fn planar_rule_is_the_complex_cross_ratio() {
    let mut r = rng(12);
    for _ in 0..200 {
        let (s1, s2, s3) = (
            random_point(&mut r),
            random_point(&mut r),
            random_point(&mut r),
        );
        let (k1, k2) = (r.random_range(-3.0..3.0), r.random_range(-3.0..3.0));
        let Ok(got) = superpose_planar_sl2(s1, s2, s3, k1, k2) else {
            continue;
        };
        let want = planar_mobius(s1, s2, s3, k1, k2);
        let scale = 1.0 + want[0].abs() + want[1].abs();
        assert!((got[0] - want[0]).abs() + (got[1] - want[1]).abs() < 1e-9 * scale);
    }
}

#[test]
fn planar_large_k1_tends_to_second_solution() {
    let (s1, s2, s3) = ([0.1, 1.0], [0.7, 0.4], [-0.5, 2.0]);
    let far = superpose_planar_sl2(s1, s2, s3, 1e7, 0.0).unwrap();
    assert!((far[0] - s2[0]).abs() < 1e-6 && (far[1] - s2[1]).abs() < 1e-6);
}

#[test]
fn planar_fit_round_trip() {
    let (s1, s2, s3) = ([0.0, 1.0], [0.5, 0.5], [-0.3, 2.0]);
    let mut r = rng(13);
    let rule = SuperpositionRule::PlanarSl2;
    let sols = vec![s1.to_vec(), s2.to_vec(), s3.to_vec()];
    for _ in 0..50 {
        let target = [r.random_range(-1.5..1.5), r.random_range(0.1..2.5)];
        let k = fit_constants(rule, &sols, &target).unwrap();
        let back = superpose_planar_sl2(s1, s2, s3, k[0], k[1]).unwrap();
        assert!((back[0] - target[0]).abs() < 1e-9 && (back[1] - target[1]).abs() < 1e-9);
    }
}

#[test]
fn riccati_rule_solves_the_equation() {
    let (h, steps) = (1e-3, 1000);
    let sols: Vec<Vec<f64>> = [0.0, 0.3f64.tan(), 0.7f64.tan()]
        .iter()
        .map(|&x0| {
            riccati_projective(|_| [1.0, 0.0, 1.0], x0, h, steps)
                .iter()
                .map(|(p, q)| p / q)
                .collect()
        })
        .collect();
    let k = ProjectivePoint::finite(0.5);
    let curve: Vec<f64> = (0..=steps)
        .map(|n| {
            let f = |i: usize| ProjectivePoint::finite(sols[i][n]);
            superpose_riccati(f(0), f(1), f(2), k).unwrap().value()
        })
        .collect();
    for n in 1..steps {
        let d = (curve[n + 1] - curve[n - 1]) / (2.0 * h);
        assert!(
            (d - (1.0 + curve[n] * curve[n])).abs() <= 10.0 * h * h,
            "n={n}"
        );
    }
}

#[test]
fn riccati_fit_inverts_superpose() {
    let mut r = rng(14);
    for _ in 0..100 {
        let xs: Vec<f64> = (0..4).map(|_| r.random_range(-5.0..5.0)).collect();
        let p = |x: f64| ProjectivePoint::finite(x);
        let k = cross_ratio(p(xs[3]), p(xs[0]), p(xs[1]), p(xs[2])).unwrap();
        let back = superpose_riccati(p(xs[0]), p(xs[1]), p(xs[2]), k).unwrap();
        assert!(back.approx_eq(&p(xs[3]), 1e-12));
        let kf = fit_constants(
            SuperpositionRule::Riccati,
            &[vec![xs[0]], vec![xs[1]], vec![xs[2]]],
            &[xs[3]],
        )
        .unwrap();
        assert!((kf[0] - k.value()).abs() <= 1e-9 * k.value().abs().max(1.0));
    }
}

#[test]
fn linear_rule_solves_time_dependent_system() {
    // ẋ = A(t) x with A from the sl(2) defining representation.
    let a = |t: f64| [[-0.3 * t.sin(), -t.cos()], [-0.5, 0.3 * t.sin()]];
    let f = |t: f64, y: &[f64]| {
        let m = a(t);
        vec![
            m[0][0] * y[0] + m[0][1] * y[1],
            m[1][0] * y[0] + m[1][1] * y[1],
        ]
    };
    let (h, steps) = (1e-3, 2000);
    let s1 = rk4(f, &[1.0, 0.0], 0.0, h, steps);
    let s2 = rk4(f, &[0.0, 1.0], 0.0, h, steps);
    let curve: Vec<Vec<f64>> = (0..=steps)
        .map(|n| superpose_linear(&[s1[n].clone(), s2[n].clone()], &[2.0, -0.7]).unwrap())
        .collect();
    for n in 1..steps {
        let rhs = f(n as f64 * h, &curve[n]);
        for i in 0..2 {
            let d = (curve[n + 1][i] - curve[n - 1][i]) / (2.0 * h);
            assert!((d - rhs[i]).abs() <= 10.0 * h * h);
        }
    }
}

#[test]
fn affine_rule_solves_inhomogeneous_scalar() {
    let f = |t: f64, y: &[f64]| vec![t.cos() - 0.4 * y[0]];
    let (h, steps) = (1e-3, 2000);
    let s1 = rk4(f, &[0.0], 0.0, h, steps);
    let s2 = rk4(f, &[1.0], 0.0, h, steps);
    for k in [-2.0, 0.3, 5.0] {
        let curve: Vec<f64> = (0..=steps)
            .map(|n| superpose_affine(&[s1[n].clone(), s2[n].clone()], &[k]).unwrap()[0])
            .collect();
        for n in 1..steps {
            let d = (curve[n + 1] - curve[n - 1]) / (2.0 * h);
            assert!((d - f(n as f64 * h, &[curve[n]])[0]).abs() <= 10.0 * h * h);
        }
    }
}

#[test]
fn distinguished_constants_are_exact() {
    assert_eq!(
        superpose_affine(&[vec![2.0], vec![5.0]], &[1.0]).unwrap(),
        vec![5.0]
    );
    assert_eq!(
        superpose_linear(&[vec![1.0, 0.0], vec![0.0, 1.0]], &[2.0, 3.0]).unwrap(),
        vec![2.0, 3.0]
    );
    let k = fit_constants(
        SuperpositionRule::Linear { n: 2 },
        &[vec![1.0, 2.0], vec![0.0, 1.0]],
        &[1.0, 2.0],
    )
    .unwrap();
    assert!((k[0] - 1.0).abs() < 1e-15 && k[1].abs() < 1e-15);
}

#[test]
fn planar_pole_is_an_error() {
    // D vanishes at k = (x2 − x3)/(x1 − x3) on the real slice.
    let r = superpose_planar_sl2([0.0, 0.0], [1.0, 0.0], [2.0, 0.0], 0.5, 0.0);
    assert!(matches!(r, Err(Error::Pole(_))));
}
