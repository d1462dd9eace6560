//! Fixed-step integration, quadrature and differencing on uniform grids.

use crate::error::{Error, Result};

/// Uniform grid on `[t0, t1]` whose step is the largest value `≤ dt` that
/// divides the window exactly.
pub fn uniform_grid(t0: f64, t1: f64, dt: f64, module: &'static str) -> Result<Vec<f64>> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidWindow {
            module,
            reason: format!("step must be positive, got {dt}"),
        });
    }
    if !(t1 > t0) || !t1.is_finite() || !t0.is_finite() {
        return Err(Error::InvalidWindow {
            module,
            reason: format!("empty window [{t0}, {t1}]"),
        });
    }
    let n = ((t1 - t0) / dt - 1e-9).ceil().max(1.0) as usize;
    let h = (t1 - t0) / n as f64;
    Ok((0..=n)
        .map(|k| if k == n { t1 } else { t0 + k as f64 * h })
        .collect())
}

/// Classical RK4 for `y' = f(t, y)` on the given grid.
pub fn rk4<F>(mut f: F, y0: &[f64], ts: &[f64], module: &'static str) -> Result<Vec<Vec<f64>>>
where
    F: FnMut(f64, &[f64]) -> Result<Vec<f64>>,
{
    let mut ys = Vec::with_capacity(ts.len());
    let mut y = y0.to_vec();
    ys.push(y.clone());
    let axpy = |y: &[f64], k: &[f64], h: f64| -> Vec<f64> {
        y.iter().zip(k).map(|(a, b)| a + h * b).collect()
    };
    for w in ts.windows(2) {
        let (t, h) = (w[0], w[1] - w[0]);
        let k1 = f(t, &y)?;
        let k2 = f(t + 0.5 * h, &axpy(&y, &k1, 0.5 * h))?;
        let k3 = f(t + 0.5 * h, &axpy(&y, &k2, 0.5 * h))?;
        let k4 = f(t + h, &axpy(&y, &k3, h))?;
        for i in 0..y.len() {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                module,
                t: Some(w[1]),
            });
        }
        ys.push(y.clone());
    }
    Ok(ys)
}

/// Running integral `∫_{t_0}^{t_k} f` on a fine grid of spacing `h` with an
/// odd number of nodes. Even nodes use composite Simpson over panels of
/// width `2h`; odd nodes add a three-point rule over the half panel.
pub fn cumulative_simpson(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    assert!(n % 2 == 1, "fine grid must have an odd number of nodes");
    let mut out = vec![0.0; n];
    let mut k = 0;
    while k + 2 < n {
        out[k + 1] = out[k] + h / 12.0 * (5.0 * f[k] + 8.0 * f[k + 1] - f[k + 2]);
        out[k + 2] = out[k] + h / 3.0 * (f[k] + 4.0 * f[k + 1] + f[k + 2]);
        k += 2;
    }
    out
}

/// Finite-difference stencil for the first derivative at node `k` of a
/// uniform grid with `n` nodes, as `(index, weight)` pairs; divide by the
/// spacing. Fourth order when `n ≥ 5`, second order otherwise.
pub fn derivative_stencil(k: usize, n: usize) -> Vec<(usize, f64)> {
    assert!(n >= 2 && k < n);
    if n < 3 {
        return vec![(0, -1.0), (1, 1.0)];
    }
    if n < 5 {
        return if k == 0 {
            vec![(0, -1.5), (1, 2.0), (2, -0.5)]
        } else if k == n - 1 {
            vec![(n - 3, 0.5), (n - 2, -2.0), (n - 1, 1.5)]
        } else {
            vec![(k - 1, -0.5), (k + 1, 0.5)]
        };
    }
    let c = 1.0 / 12.0;
    match k {
        0 => vec![
            (0, -25.0 * c),
            (1, 48.0 * c),
            (2, -36.0 * c),
            (3, 16.0 * c),
            (4, -3.0 * c),
        ],
        1 => vec![
            (0, -3.0 * c),
            (1, -10.0 * c),
            (2, 18.0 * c),
            (3, -6.0 * c),
            (4, c),
        ],
        k if k == n - 2 => vec![
            (n - 5, -c),
            (n - 4, 6.0 * c),
            (n - 3, -18.0 * c),
            (n - 2, 10.0 * c),
            (n - 1, 3.0 * c),
        ],
        k if k == n - 1 => vec![
            (n - 5, 3.0 * c),
            (n - 4, -16.0 * c),
            (n - 3, 36.0 * c),
            (n - 2, -48.0 * c),
            (n - 1, 25.0 * c),
        ],
        k => vec![(k - 2, c), (k - 1, -8.0 * c), (k + 1, 8.0 * c), (k + 2, -c)],
    }
}

/// Checks that `ts` is uniform to relative tolerance and returns the step.
pub fn uniform_step(ts: &[f64], module: &'static str) -> Result<f64> {
    if ts.len() < 2 {
        return Err(Error::Grid {
            module,
            reason: "need at least two grid points".into(),
        });
    }
    let h = (ts[ts.len() - 1] - ts[0]) / (ts.len() - 1) as f64;
    for w in ts.windows(2) {
        if ((w[1] - w[0]) - h).abs() > 1e-6 * h {
            return Err(Error::Grid {
                module,
                reason: "grid is not uniform".into(),
            });
        }
    }
    Ok(h)
}
