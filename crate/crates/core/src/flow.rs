//! Direct integration of the right-invariant equation `ġ = A(t) g` with
//! `A(t) = −Σ b_α(t) M_α`.

use crate::curve::CoefficientCurve;
use crate::error::{Error, Result};
use crate::io;
use crate::ode::uniform_grid;
use crate::rep::{invert, MatrixRep};
use crate::scalar::{is_finite, Scalar};
use nalgebra::DMatrix;

const MODULE: &str = "group-flow";

/// A discretized curve in a matrix group.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupTrajectory<T: Scalar> {
    pub ts: Vec<f64>,
    pub gs: Vec<DMatrix<T>>,
}

impl<T: Scalar> GroupTrajectory<T> {
    pub fn new(ts: Vec<f64>, gs: Vec<DMatrix<T>>) -> Result<Self> {
        if ts.len() != gs.len() || ts.is_empty() {
            return Err(Error::Grid {
                module: MODULE,
                reason: format!("{} times for {} matrices", ts.len(), gs.len()),
            });
        }
        if ts.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Grid {
                module: MODULE,
                reason: "times must be strictly increasing".into(),
            });
        }
        let n = gs[0].nrows();
        if let Some(g) = gs.iter().find(|g| g.nrows() != n || g.ncols() != n) {
            return Err(Error::dim(MODULE, n, g.nrows()));
        }
        Ok(GroupTrajectory { ts, gs })
    }

    pub fn len(&self) -> usize {
        self.ts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ts.is_empty()
    }

    pub fn size(&self) -> usize {
        self.gs[0].nrows()
    }

    pub fn last(&self) -> &DMatrix<T> {
        &self.gs[self.gs.len() - 1]
    }

    /// Largest manifold drift along the curve.
    pub fn max_drift(&self, rep: &MatrixRep<T>) -> f64 {
        self.gs
            .iter()
            .map(|g| rep.manifold_drift(g))
            .fold(0.0, f64::max)
    }

    /// Largest pointwise Frobenius distance to another trajectory on the same grid.
    pub fn max_distance(&self, other: &Self) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::Grid {
                module: MODULE,
                reason: format!("{} vs {} grid points", self.len(), other.len()),
            });
        }
        Ok(self
            .gs
            .iter()
            .zip(&other.gs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Largest interior residual `‖(g_{k+1} − g_{k−1})/(t_{k+1} − t_{k−1}) − A(t_k) g_k‖_F`.
    pub fn residual(&self, rep: &MatrixRep<T>, b: &CoefficientCurve) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for k in 1..self.len().saturating_sub(1) {
            let dg = (&self.gs[k + 1] - &self.gs[k - 1])
                * T::of_f64(1.0 / (self.ts[k + 1] - self.ts[k - 1]));
            let a = generator(rep, b, self.ts[k])?;
            worst = worst.max((dg - a * &self.gs[k]).norm());
        }
        Ok(worst)
    }

    /// CSV with header `t,g00,g01,…` (row-major; complex entries as
    /// `gij_re,gij_im`).
    pub fn to_csv(&self) -> String {
        let n = self.size();
        let mut header = vec!["t".to_string()];
        for i in 0..n {
            for j in 0..n {
                if T::IS_COMPLEX {
                    header.push(format!("g{i}{j}_re"));
                    header.push(format!("g{i}{j}_im"));
                } else {
                    header.push(format!("g{i}{j}"));
                }
            }
        }
        let rows = self.ts.iter().zip(&self.gs).map(|(t, g)| {
            let mut row = vec![*t];
            row.extend(crate::scalar::vectorize(g));
            row
        });
        io::write_csv(&header, rows, &[])
    }

    /// Parses the format written by [`GroupTrajectory::to_csv`].
    pub fn from_csv(text: &str) -> Result<Self> {
        let table = io::read_csv(text)?;
        let per = if T::IS_COMPLEX { 2 } else { 1 };
        let cols = table.header.len() - 1;
        let n = (((cols / per) as f64).sqrt()).round() as usize;
        if n == 0 || n * n * per != cols {
            return Err(Error::Format(format!(
                "{cols} matrix columns do not form a square {} matrix",
                if T::IS_COMPLEX { "complex" } else { "real" }
            )));
        }
        let mut ts = Vec::with_capacity(table.rows.len());
        let mut gs = Vec::with_capacity(table.rows.len());
        for row in &table.rows {
            ts.push(row[0]);
            let vals: Vec<T> = row[1..]
                .chunks(per)
                .map(|c| T::from_parts(c[0], if per == 2 { c[1] } else { 0.0 }))
                .collect();
            gs.push(DMatrix::from_row_slice(n, n, &vals));
        }
        Self::new(ts, gs)
    }
}

/// `A(t) = −Σ b_α(t) M_α`.
pub fn generator<T: Scalar>(
    rep: &MatrixRep<T>,
    b: &CoefficientCurve,
    t: f64,
) -> Result<DMatrix<T>> {
    let bt = b.eval(t)?;
    if bt.len() != rep.dim() {
        return Err(Error::dim(MODULE, rep.dim(), bt.len()));
    }
    let neg: Vec<f64> = bt.iter().map(|x| -x).collect();
    rep.element(&neg)
}

/// RK4 on `[0, t_end]` from the identity.
pub fn solve_group_direct<T: Scalar>(
    rep: &MatrixRep<T>,
    b: &CoefficientCurve,
    t_end: f64,
    dt: f64,
) -> Result<GroupTrajectory<T>> {
    let ts = uniform_grid(0.0, t_end, dt, MODULE)?;
    solve_group_on_grid(rep, b, &ts)
}

/// RK4 on an explicit increasing grid, starting from the identity at `ts[0]`.
pub fn solve_group_on_grid<T: Scalar>(
    rep: &MatrixRep<T>,
    b: &CoefficientCurve,
    ts: &[f64],
) -> Result<GroupTrajectory<T>> {
    if b.dim() != rep.dim() {
        return Err(Error::dim(MODULE, rep.dim(), b.dim()));
    }
    if ts.is_empty() {
        return Err(Error::InvalidWindow {
            module: MODULE,
            reason: "empty grid".into(),
        });
    }
    b.check_window(ts[0], ts[ts.len() - 1])?;
    let n = rep.size();
    let mut g = DMatrix::<T>::identity(n, n);
    let mut gs = Vec::with_capacity(ts.len());
    gs.push(g.clone());
    for w in ts.windows(2) {
        let (t, h) = (w[0], w[1] - w[0]);
        let hs = T::of_f64(h);
        let half = T::of_f64(0.5 * h);
        let a1 = generator(rep, b, t)?;
        let am = generator(rep, b, t + 0.5 * h)?;
        let a2 = generator(rep, b, t + h)?;
        let k1 = &a1 * &g;
        let k2 = &am * (&g + &k1 * half);
        let k3 = &am * (&g + &k2 * half);
        let k4 = &a2 * (&g + &k3 * hs);
        g += (k1 + (k2 + k3) * T::of_f64(2.0) + k4) * T::of_f64(h / 6.0);
        if !is_finite(&g) {
            return Err(Error::NonFinite {
                module: MODULE,
                t: Some(w[1]),
            });
        }
        gs.push(g.clone());
    }
    Ok(GroupTrajectory {
        ts: ts.to_vec(),
        gs,
    })
}

/// Pointwise `g(t) · g0`: the solution of the same equation with `g(0) = g0`.
pub fn right_translate<T: Scalar>(
    traj: &GroupTrajectory<T>,
    g0: &DMatrix<T>,
) -> Result<GroupTrajectory<T>> {
    let n = traj.size();
    if g0.nrows() != n || g0.ncols() != n {
        return Err(Error::dim(MODULE, n, g0.nrows()));
    }
    invert(g0, MODULE)?;
    Ok(GroupTrajectory {
        ts: traj.ts.clone(),
        gs: traj.gs.iter().map(|g| g * g0).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expm::expm;

    #[test]
    fn zero_drive_stays_at_identity() {
        let rep = MatrixRep::sl2_defining();
        let b = CoefficientCurve::constant(vec![0.0; 3]);
        let traj = solve_group_direct(&rep, &b, 1.0, 0.1).unwrap();
        assert!(traj.gs.iter().all(|g| *g == DMatrix::identity(2, 2)));
    }

    #[test]
    fn constant_drive_matches_exponential() {
        let rep = MatrixRep::so3_defining();
        let bv = vec![0.3, -0.7, 1.1];
        let b = CoefficientCurve::constant(bv.clone());
        let traj = solve_group_direct(&rep, &b, 1.0, 1e-3).unwrap();
        let a = rep.element(&bv).unwrap() * -1.0;
        let want = expm(&a).unwrap();
        assert!((traj.last() - want).norm() < 1e-8);
    }

    #[test]
    fn window_outside_samples_is_rejected() {
        let rep = MatrixRep::affine_2x2();
        let b = CoefficientCurve::sampled(vec![0.0, 0.5], vec![vec![1.0, 0.0], vec![1.0, 0.0]])
            .unwrap();
        assert!(matches!(
            solve_group_direct(&rep, &b, 1.0, 0.1),
            Err(Error::CurveUndefined { .. })
        ));
    }

    #[test]
    fn dimension_mismatch() {
        let rep = MatrixRep::affine_2x2();
        let b = CoefficientCurve::constant(vec![1.0; 3]);
        assert!(matches!(
            solve_group_direct(&rep, &b, 1.0, 0.1),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn csv_round_trip() {
        let rep = MatrixRep::sl2_defining();
        let b = CoefficientCurve::parse("cos,0.3,sin").unwrap();
        let traj = solve_group_direct(&rep, &b, 0.5, 0.1).unwrap();
        let back = GroupTrajectory::<f64>::from_csv(&traj.to_csv()).unwrap();
        assert_eq!(back, traj);
    }
}
