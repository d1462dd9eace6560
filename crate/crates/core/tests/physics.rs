mod common;

use common::{rk4, rng};
use lieflow_core::physics::{
    classical_linear_potential, propagator_factors, quantum_linear_potential, spin_evolution,
    LinearPotentialDrive, MagneticDrive, MomentumWavefunction,
};
use lieflow_core::{CoefficientCurve, Error, HomogeneousAction, Point};
use num_complex::Complex64;
use rand::Rng;

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        s += if k % 2 == 1 { 4.0 } else { 2.0 } * f(a + k as f64 * h);
    }
    s * h / 3.0
}

#[test]
fn phase_plane_fields_are_hamiltonian() {
    // p∂x, ∂p, ∂x are (−∂h/∂p, ∂h/∂x) for h = −p²/2, x, −p.
    let hs: [fn(f64, f64) -> f64; 3] = [|_, p| -p * p / 2.0, |x, _| x, |_, p| -p];
    let action = HomogeneousAction::heisenberg_plane();
    let mut r = rng(5);
    let e = 1e-5;
    for _ in 0..10 {
        let (x, p) = (r.random_range(-2.0..2.0), r.random_range(-2.0..2.0));
        for (a, h) in hs.iter().enumerate() {
            let hx = (h(x + e, p) - h(x - e, p)) / (2.0 * e);
            let hp = (h(x, p + e) - h(x, p - e)) / (2.0 * e);
            let v = action
                .fundamental_vector_field(a, &Point::Plane([x, p]))
                .unwrap();
            assert!((v[0] + hp).abs() < 1e-8 && (v[1] - hx).abs() < 1e-8);
        }
        // {h₁, h₂} = −h₃ and {h₂, h₃} = −1 with {f, g} = f_x g_p − f_p g_x
        let bracket = |f: fn(f64, f64) -> f64, g: fn(f64, f64) -> f64| {
            let d = |h: fn(f64, f64) -> f64| {
                (
                    (h(x + e, p) - h(x - e, p)) / (2.0 * e),
                    (h(x, p + e) - h(x, p - e)) / (2.0 * e),
                )
            };
            let ((fx, fp), (gx, gp)) = (d(f), d(g));
            fx * gp - fp * gx
        };
        assert!((bracket(hs[0], hs[1]) + hs[2](x, p)).abs() < 1e-8);
        assert!((bracket(hs[1], hs[2]) + 1.0).abs() < 1e-8);
    }
}

#[test]
fn classical_motion_matches_newton() {
    let drive = LinearPotentialDrive::cosine(1.3, 1.0, 0.8, 0.5, 2.0).unwrap();
    let f = |t: f64| 0.8 + 0.5 * (2.0 * t).cos();
    let h = 1e-3;
    let oracle = rk4(|t, y| vec![y[1] / 1.3, -f(t)], &[0.4, -0.7], 0.0, h, 3000);
    let m = classical_linear_potential(&drive, 0.4, -0.7, 3.0, h).unwrap();
    for (k, y) in oracle.iter().enumerate() {
        assert!((m.xs[k] - y[0]).abs() < 1e-10 && (m.ps[k] - y[1]).abs() < 1e-10);
    }
    assert!(m.max_i1_drift() < 1e-10 && m.max_i2_drift() < 1e-10);
    let csv = m.to_csv();
    assert!(csv.starts_with("t,x,p,I1,I2"));
    assert_eq!(csv.lines().count(), 3002);
}

#[test]
fn quantum_matches_characteristics() {
    let (m, t) = (1.3, 1.5);
    let (p0, sigma, x0) = (0.5, 1.0, 0.3);
    let drive = LinearPotentialDrive::cosine(m, 1.0, 0.8, 0.5, 2.0).unwrap();
    let big_f = |s: f64| 0.8 * s + 0.25 * (2.0 * s).sin();
    let psi0 = MomentumWavefunction::gaussian(512, 20.0, p0, sigma, x0).unwrap();
    let out = quantum_linear_potential(&drive, &psi0, t, 1e-3).unwrap();
    assert!(!out.aliasing);

    let raw =
        |p: f64| Complex64::from_polar((-(p - p0).powi(2) / (4.0 * sigma * sigma)).exp(), -p * x0);
    let j0 = psi0.len() / 2;
    let c = psi0.amplitudes()[j0] / raw(psi0.p(j0));
    let ft = big_f(t);
    let mut worst = 0.0f64;
    for (j, z) in out.psi.amplitudes().iter().enumerate() {
        let p = out.psi.p(j);
        let phase = simpson(|s| (p + ft - big_f(s)).powi(2), 0.0, t, 400) / (2.0 * m);
        let exact = c * raw(p + ft) * Complex64::from_polar(1.0, -phase);
        worst = worst.max((z - exact).norm());
    }
    assert!(worst < 1e-8, "{worst}");
}

#[test]
fn free_evolution_keeps_the_modulus() {
    let drive = LinearPotentialDrive::constant(1.0, 0.0).unwrap();
    let psi0 = MomentumWavefunction::gaussian(256, 15.0, 1.0, 0.8, -0.5).unwrap();
    let out = quantum_linear_potential(&drive, &psi0, 2.0, 1e-2).unwrap();
    for (a, b) in out.psi.amplitudes().iter().zip(psi0.amplitudes()) {
        assert!((a.norm() - b.norm()).abs() < 1e-13);
    }
    assert!(out.coords[1].abs() < 1e-15);
}

#[test]
fn mean_momentum_follows_the_force() {
    let drive = LinearPotentialDrive::cosine(0.7, 2.0, 0.3, 0.6, 1.5).unwrap();
    let f = |s: f64| 2.0 * (0.3 + 0.6 * (1.5 * s).cos());
    let psi0 = MomentumWavefunction::gaussian(512, 24.0, 0.0, 1.2, 0.0).unwrap();
    let dt = 1e-3;
    let ts = [0.25, 0.5, 1.0, 1.5];
    let means: Vec<f64> = ts
        .iter()
        .map(|&t| {
            quantum_linear_potential(&drive, &psi0, t, dt)
                .unwrap()
                .psi
                .mean_momentum()
        })
        .collect();
    for k in 0..ts.len() {
        let expected = psi0.mean_momentum() - simpson(f, 0.0, ts[k], 200);
        assert!((means[k] - expected).abs() < 1e-6);
    }
    // d⟨p⟩/dt = −f by central difference
    let t = 1.0;
    let e = 1e-2;
    let d = |s: f64| {
        quantum_linear_potential(&drive, &psi0, s, dt / 10.0)
            .unwrap()
            .psi
            .mean_momentum()
    };
    let slope = (d(t + e) - d(t - e)) / (2.0 * e);
    assert!((slope + f(t)).abs() < 1e-3);
}

#[test]
fn constant_force_moves_the_peak() {
    let (m, f0, t) = (2.0, 1.5, 2.0);
    let drive = LinearPotentialDrive::constant(m, f0).unwrap();
    let psi0 = MomentumWavefunction::gaussian(1024, 32.0, 1.0, 0.5, 0.0).unwrap();
    let out = quantum_linear_potential(&drive, &psi0, t, 1e-3).unwrap();
    assert!((out.coords[1] + f0 * t).abs() < 1e-12);
    let peak = |w: &MomentumWavefunction| {
        let a = w.amplitudes();
        (0..a.len())
            .max_by(|&i, &j| a[i].norm().total_cmp(&a[j].norm()))
            .unwrap()
    };
    let shift = out.psi.p(peak(&out.psi)) - psi0.p(peak(&psi0));
    assert!((shift + f0 * t).abs() <= psi0.dp());
}

#[test]
fn wide_shift_is_rejected() {
    let drive = LinearPotentialDrive::constant(1.0, 10.0).unwrap();
    let psi0 = MomentumWavefunction::gaussian(64, 8.0, 0.0, 1.0, 0.0).unwrap();
    let err = quantum_linear_potential(&drive, &psi0, 1.0, 1e-2).unwrap_err();
    assert!(matches!(err, Error::GridTooSmall { .. }));
}

#[test]
fn propagator_factorizations_agree() {
    let drive = LinearPotentialDrive::cosine(1.0, -1.0, 0.5, 1.0, 3.0).unwrap();
    let pf = propagator_factors(&drive, 2.0, 1e-3).unwrap();
    assert!(pf.gap < 1e-9);
    let zero = propagator_factors(&drive, 0.0, 1e-3).unwrap();
    assert!(zero.u.last().iter().chain(zero.v.last()).all(|&v| v == 0.0));
}

#[test]
fn wavefunction_csv_round_trip() {
    let psi = MomentumWavefunction::gaussian(64, 6.0, 0.2, 0.7, 1.1).unwrap();
    let back = MomentumWavefunction::from_csv(&psi.to_csv()).unwrap();
    assert_eq!(back.len(), 64);
    for (a, b) in back.amplitudes().iter().zip(psi.amplitudes()) {
        assert!((a - b).norm() < 1e-15);
    }
    assert!(MomentumWavefunction::from_csv("p,re,im\n0,1,0\n1,0,0\n3,0,0\n").is_err());
}

fn bloch(psi: [Complex64; 2]) -> [f64; 3] {
    let ab = psi[0].conj() * psi[1];
    [
        2.0 * ab.re,
        2.0 * ab.im,
        psi[0].norm_sqr() - psi[1].norm_sqr(),
    ]
}

#[test]
fn rotating_field_spinor_and_rotation() {
    let (mu, b0, b1, w) = (0.9, 1.0, 0.4, 2.5);
    let field = CoefficientCurve::parse(&format!("cos:{b1}:{w},sin:{b1}:{w},{b0}")).unwrap();
    let drive = MagneticDrive::new(field, mu).unwrap();
    let h = 1e-3;
    let s = spin_evolution(&drive, 4.0, h).unwrap();
    assert!(s.unitarity_violation() < 1e-12);
    assert!(s.orthogonality_violation() < 1e-12);
    assert!(s.covering_error().unwrap() < 1e-12);

    // iψ̇ = −(μ/2) B·σ ψ, on real and imaginary parts
    let psi0 = [Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
    let rhs = |t: f64, y: &[f64]| {
        let (bx, by, bz) = (b1 * (w * t).cos(), b1 * (w * t).sin(), b0);
        let a = Complex64::new(y[0], y[1]);
        let b = Complex64::new(y[2], y[3]);
        let i = Complex64::i();
        let k = i * mu / 2.0;
        let da = k * (bz * a + Complex64::new(bx, -by) * b);
        let db = k * (Complex64::new(bx, by) * a - bz * b);
        vec![da.re, da.im, db.re, db.im]
    };
    let oracle = rk4(rhs, &[0.6, 0.0, 0.0, 0.8], 0.0, h, 4000);
    let psis = s.apply_to_spinor(psi0);
    let s0 = bloch(psi0);
    for ((psi, y), r) in psis.iter().zip(&oracle).zip(&s.rotation.gs) {
        assert!((psi[0] - Complex64::new(y[0], y[1])).norm() < 1e-10);
        assert!((psi[1] - Complex64::new(y[2], y[3])).norm() < 1e-10);
        assert!((psi[0].norm_sqr() + psi[1].norm_sqr() - 1.0).abs() < 1e-12);
        let st = bloch(*psi);
        for j in 0..3 {
            let rs: f64 = (0..3).map(|k| r[(j, k)] * s0[k]).sum();
            assert!((st[j] - rs).abs() < 1e-10);
        }
    }
}
