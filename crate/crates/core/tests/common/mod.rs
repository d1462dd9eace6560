#![allow(dead_code)]

use lieflow_core::expm;
use nalgebra::DMatrix;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Plain RK4 on a uniform grid, independent of the library integrator.
pub fn rk4<F>(f: F, y0: &[f64], t0: f64, h: f64, steps: usize) -> Vec<Vec<f64>>
where
    F: Fn(f64, &[f64]) -> Vec<f64>,
{
    let add = |y: &[f64], k: &[f64], s: f64| -> Vec<f64> {
        y.iter().zip(k).map(|(a, b)| a + s * b).collect()
    };
    let mut ys = vec![y0.to_vec()];
    let mut y = y0.to_vec();
    for n in 0..steps {
        let t = t0 + n as f64 * h;
        let k1 = f(t, &y);
        let k2 = f(t + h / 2.0, &add(&y, &k1, h / 2.0));
        let k3 = f(t + h / 2.0, &add(&y, &k2, h / 2.0));
        let k4 = f(t + h, &add(&y, &k3, h));
        for i in 0..y.len() {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        ys.push(y.clone());
    }
    ys
}

/// Riccati `ẋ = c0 + c1 x + c2 x²` linearized on homogeneous coordinates
/// `x = p/q`, so that solutions may pass through ∞.
pub fn riccati_projective(
    c: impl Fn(f64) -> [f64; 3],
    x0: f64,
    h: f64,
    steps: usize,
) -> Vec<(f64, f64)> {
    let f = |t: f64, y: &[f64]| {
        let [c0, c1, c2] = c(t);
        vec![0.5 * c1 * y[0] + c0 * y[1], -c2 * y[0] - 0.5 * c1 * y[1]]
    };
    rk4(f, &[x0, 1.0], 0.0, h, steps)
        .into_iter()
        .map(|y| (y[0], y[1]))
        .collect()
}

/// Smooth random curve `exp(Σ (c_i + a_i sin(ω_i t)) M_i)` on `ts`.
pub fn random_curve(mats: &[DMatrix<f64>], ts: &[f64], rng: &mut StdRng) -> Vec<DMatrix<f64>> {
    let params: Vec<(f64, f64, f64)> = mats
        .iter()
        .map(|_| {
            (
                rng.random_range(-0.5..0.5),
                rng.random_range(-0.5..0.5),
                rng.random_range(0.5..2.0),
            )
        })
        .collect();
    ts.iter()
        .map(|&t| {
            let mut x = DMatrix::zeros(mats[0].nrows(), mats[0].ncols());
            for (m, (c, a, w)) in mats.iter().zip(&params) {
                x += m * (c + a * (w * t).sin());
            }
            expm(&x).unwrap()
        })
        .collect()
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn grid(t0: f64, h: f64, steps: usize) -> Vec<f64> {
    (0..=steps).map(|k| t0 + k as f64 * h).collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
