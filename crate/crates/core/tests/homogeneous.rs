mod common;

use common::{riccati_projective, rk4, rng};
use lieflow_core::homogeneous::riccati_to_b;
use lieflow_core::{
    solve_group_direct, CoefficientCurve, HomogeneousAction, Point, ProjectivePoint,
};
use rand::Rng;

fn field(action: &HomogeneousAction, alpha: usize, x: &[f64]) -> Vec<f64> {
    action
        .fundamental_vector_field(alpha, &action.point(x).unwrap())
        .unwrap()
}

#[test]
fn closed_form_fields() {
    let sl2 = HomogeneousAction::sl2_homography();
    for x in [-1.5, 0.0, 2.0] {
        let got: Vec<f64> = (0..3).map(|a| field(&sl2, a, &[x])[0]).collect();
        let want = [-1.0, -x, -x * x];
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() < 1e-8, "x={x}: {got:?}");
        }
    }
    let aff = HomogeneousAction::affine_line();
    assert!((field(&aff, 0, &[3.0])[0] + 1.0).abs() < 1e-8);
    assert!((field(&aff, 1, &[3.0])[0] + 3.0).abs() < 1e-8);

    let h = HomogeneousAction::heisenberg_plane();
    let (x, p) = (0.4, -1.3);
    let want = [[p, 0.0], [0.0, 1.0], [1.0, 0.0]];
    for (a, w) in want.iter().enumerate() {
        let got = field(&h, a, &[x, p]);
        assert!((got[0] - w[0]).abs() < 1e-8 && (got[1] - w[1]).abs() < 1e-8);
    }
}

// [X, Y]^i = X^j ∂_j Y^i − Y^j ∂_j X^i by central differences
fn field_bracket(action: &HomogeneousAction, a: usize, b: usize, x: &[f64]) -> Vec<f64> {
    let h = 1e-4;
    let n = x.len();
    let partial = |alpha: usize, j: usize| -> Vec<f64> {
        let (mut xp, mut xm) = (x.to_vec(), x.to_vec());
        xp[j] += h;
        xm[j] -= h;
        let (fp, fm) = (field(action, alpha, &xp), field(action, alpha, &xm));
        fp.iter()
            .zip(&fm)
            .map(|(p, m)| (p - m) / (2.0 * h))
            .collect()
    };
    let (xa, xb) = (field(action, a, x), field(action, b, x));
    let mut out = vec![0.0; n];
    for j in 0..n {
        let (db, da) = (partial(b, j), partial(a, j));
        for i in 0..n {
            out[i] += xa[j] * db[i] - xb[j] * da[i];
        }
    }
    out
}

#[test]
fn fields_represent_the_algebra() {
    let mut r = rng(21);
    for action in [
        HomogeneousAction::sl2_homography(),
        HomogeneousAction::affine_line(),
        HomogeneousAction::heisenberg_plane(),
    ] {
        let alg = action.rep().algebra().clone();
        let d = action.kind().chart_dim();
        for _ in 0..5 {
            let x: Vec<f64> = (0..d).map(|_| r.random_range(-1.5..1.5)).collect();
            for a in 0..alg.dim() {
                for b in 0..alg.dim() {
                    let lhs = field_bracket(&action, a, b, &x);
                    let mut rhs = vec![0.0; d];
                    for c in 0..alg.dim() {
                        let f = alg.f(a, b, c);
                        if f != 0.0 {
                            for (o, v) in rhs.iter_mut().zip(field(&action, c, &x)) {
                                *o += f * v;
                            }
                        }
                    }
                    for (l, r) in lhs.iter().zip(&rhs) {
                        assert!((l - r).abs() < 1e-5, "{:?} {a},{b} at {x:?}", action.kind());
                    }
                }
            }
        }
    }
}

#[test]
fn one_trajectory_gives_every_riccati_solution() {
    // ẋ = c0 + c1 x + c2 x² with c = (0.5, cos t, −0.8)
    let c = |t: f64| [0.5, t.cos(), -0.8];
    let b = CoefficientCurve::parse("-0.5,cos:-1:1,0.8").unwrap();
    assert_eq!(riccati_to_b([0.5, 1.0, -0.8]), [-0.5, -1.0, 0.8]);
    let action = HomogeneousAction::sl2_homography();
    let (h, steps) = (1e-3, 3000);
    let traj = solve_group_direct(action.rep(), &b, 3.0, h).unwrap();
    for x0 in [-2.0, -0.3, 0.0, 1.7] {
        let curve = action
            .propagate(&traj, &action.point(&[x0]).unwrap())
            .unwrap();
        let oracle = riccati_projective(c, x0, h, steps);
        for (pt, (p, q)) in curve.points.iter().zip(oracle) {
            let Point::Projective(pt) = pt else {
                unreachable!()
            };
            let want = ProjectivePoint::new(p, q).unwrap();
            assert!(pt.approx_eq(&want, 1e-6), "x0={x0}");
        }
    }
}

#[test]
fn propagated_curves_satisfy_the_lie_system() {
    let cases = [
        (HomogeneousAction::affine_line(), "cos,0.5", vec![1.2]),
        (
            HomogeneousAction::heisenberg_plane(),
            "1,sin,0.3",
            vec![0.2, -0.4],
        ),
        (
            HomogeneousAction::sl2_homography(),
            "-1,0.2,-0.5",
            vec![0.1],
        ),
    ];
    let h = 1e-3;
    for (action, b, x0) in cases {
        let b = CoefficientCurve::parse(b).unwrap();
        let traj = solve_group_direct(action.rep(), &b, 1.0, h).unwrap();
        let curve = action
            .propagate(&traj, &action.point(&x0).unwrap())
            .unwrap();
        let xs = curve.chart_values().unwrap();
        for n in 1..xs.len() - 1 {
            let bt = b.eval(curve.ts[n]).unwrap();
            let rhs = action.lie_system_rhs(&bt, &curve.points[n]).unwrap();
            for i in 0..x0.len() {
                let d = (xs[n + 1][i] - xs[n - 1][i]) / (2.0 * h);
                assert!(
                    (d - rhs[i]).abs() <= 10.0 * h * h,
                    "{:?} n={n}",
                    action.kind()
                );
            }
        }
    }
}

#[test]
fn affine_general_solution() {
    // ẋ = −b0 − b1 x, x = e^{−∫b1}(x0 − ∫ b0 e^{∫b1})
    let b = CoefficientCurve::parse("cos,0.5").unwrap();
    let action = HomogeneousAction::affine_line();
    let traj = solve_group_direct(action.rep(), &b, 2.0, 1e-3).unwrap();
    let x0 = 0.8;
    let curve = action.propagate(&traj, &Point::Line(x0)).unwrap();
    let oracle = rk4(|t, x| vec![-t.cos() - 0.5 * x[0]], &[x0], 0.0, 1e-3, 2000);
    for (x, o) in curve.chart_values().unwrap().iter().zip(oracle) {
        assert!((x[0] - o[0]).abs() < 1e-10);
    }
}

#[test]
fn action_axioms_on_random_points() {
    let mut r = rng(22);
    for action in [
        HomogeneousAction::sl2_homography(),
        HomogeneousAction::affine_line(),
        HomogeneousAction::heisenberg_plane(),
    ] {
        let mats = action.rep().mats().to_vec();
        let ts = [0.0, 0.4];
        let g1 = common::random_curve(&mats, &ts, &mut r)[1].clone();
        let g2 = common::random_curve(&mats, &ts, &mut r)[1].clone();
        for _ in 0..10 {
            let x: Vec<f64> = (0..action.kind().chart_dim())
                .map(|_| r.random_range(-3.0..3.0))
                .collect();
            let x = action.point(&x).unwrap();
            let lhs = action.act(&(&g1 * &g2), &x).unwrap().chart().unwrap();
            let rhs = action
                .act(&g1, &action.act(&g2, &x).unwrap())
                .unwrap()
                .chart()
                .unwrap();
            for (a, b) in lhs.iter().zip(&rhs) {
                assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0));
            }
        }
    }
}

#[test]
fn curve_csv_marks_infinity() {
    // starting at ∞ with ẋ = 1 + x²: x(t) = −cot t
    let action = HomogeneousAction::sl2_homography();
    let b = CoefficientCurve::constant(vec![-1.0, 0.0, -1.0]);
    let traj = solve_group_direct(action.rep(), &b, 1.0, 1e-2).unwrap();
    let curve = action
        .propagate(&traj, &Point::Projective(ProjectivePoint::INFINITY))
        .unwrap();
    assert!(curve.chart_values().is_err());
    let csv = curve.to_csv();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("# action="));
    assert_eq!(lines.next().unwrap(), "t,x,p,q");
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[1], "inf");
    let Point::Projective(last) = curve.points.last().unwrap() else {
        unreachable!()
    };
    assert!((last.value() + 1.0 / 1f64.tan()).abs() < 1e-9);
}
