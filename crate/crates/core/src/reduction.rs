//! Gauge transformations of the group equation and reduction to a subgroup
//! from a known particular solution.
//!
//! A curve `g′(t)` maps solutions `g` to `ḡ = g′ g`, which solve the group
//! equation with `b̄ = Ad(g′) b − [ġ′ g′⁻¹]` (brackets denote coordinates in
//! the basis). Writing `g = g₁ h` with `g₁` a lift of a particular solution
//! leaves `h` in the stabilizer, driven by `b_h = Ad(g₁⁻¹)(b + [ġ₁ g₁⁻¹])`.

use crate::curve::CoefficientCurve;
use crate::error::{Error, Result};
use crate::flow::{right_translate, solve_group_on_grid, GroupTrajectory};
use crate::homogeneous::{ActionKind, HomogeneousAction, PointCurve};
use crate::io;
use crate::ode::{derivative_stencil, uniform_step};
use crate::rep::{invert, MatrixRep, RealRep};
use crate::scalar::Scalar;
use nalgebra::DMatrix;

const MODULE: &str = "reduction";

/// Largest allowed out-of-subalgebra component of `b_h`.
pub const LEAKAGE_TOL: f64 = 1e-6;
const INVERTIBLE_DET: f64 = 1e-10;

/// A curve `g′(t)` on a uniform grid, with derivatives by finite
/// differences (fourth order when there are at least five points).
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeCurve<T: Scalar> {
    ts: Vec<f64>,
    gs: Vec<DMatrix<T>>,
    h: f64,
}

impl<T: Scalar> GaugeCurve<T> {
    pub fn new(ts: Vec<f64>, gs: Vec<DMatrix<T>>) -> Result<Self> {
        if ts.len() != gs.len() {
            return Err(Error::Grid {
                module: MODULE,
                reason: format!("{} times for {} matrices", ts.len(), gs.len()),
            });
        }
        let h = uniform_step(&ts, MODULE)?;
        for (t, g) in ts.iter().zip(&gs) {
            if g.nrows() != g.ncols() || g.nrows() != gs[0].nrows() {
                return Err(Error::dim(MODULE, gs[0].nrows(), g.nrows()));
            }
            if !(g.clone().determinant().modulus() >= INVERTIBLE_DET) {
                return Err(Error::Singular {
                    module: MODULE,
                    t: Some(*t),
                });
            }
        }
        Ok(GaugeCurve { ts, gs, h })
    }

    pub fn from_trajectory(traj: &GroupTrajectory<T>) -> Result<Self> {
        Self::new(traj.ts.clone(), traj.gs.clone())
    }

    pub fn ts(&self) -> &[f64] {
        &self.ts
    }

    pub fn gs(&self) -> &[DMatrix<T>] {
        &self.gs
    }

    pub fn len(&self) -> usize {
        self.ts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ts.is_empty()
    }

    /// `ġ′` at grid node `k`.
    pub fn derivative(&self, k: usize) -> DMatrix<T> {
        let n = self.gs[0].nrows();
        let mut d = DMatrix::<T>::zeros(n, n);
        for (i, w) in derivative_stencil(k, self.len()) {
            d += &self.gs[i] * T::of_f64(w / self.h);
        }
        d
    }

    /// Coordinates of `ġ′ g′⁻¹` at every node.
    pub fn right_log_derivative(&self, rep: &MatrixRep<T>) -> Result<Vec<Vec<f64>>> {
        (0..self.len())
            .map(|k| {
                let ginv = invert(&self.gs[k], MODULE)?;
                decompose_in_algebra(rep, &(self.derivative(k) * ginv), self.ts[k])
            })
            .collect()
    }

    /// Inverse curve `g′(t)⁻¹`.
    pub fn inverse(&self) -> Result<Self> {
        let gs = self
            .gs
            .iter()
            .map(|g| invert(g, MODULE))
            .collect::<Result<Vec<_>>>()?;
        Ok(GaugeCurve {
            ts: self.ts.clone(),
            gs,
            h: self.h,
        })
    }

    /// `g′(t)` by linear interpolation between nodes (exact at nodes).
    pub fn at(&self, t: f64) -> Result<DMatrix<T>> {
        let (t0, t1) = (self.ts[0], self.ts[self.len() - 1]);
        let slack = 1e-9 * self.h;
        if t < t0 - slack || t > t1 + slack {
            return Err(Error::Grid {
                module: MODULE,
                reason: format!("t={t} outside the gauge window [{t0}, {t1}]"),
            });
        }
        let x = ((t - t0) / self.h).clamp(0.0, (self.len() - 1) as f64);
        let k = x.round();
        if (x - k).abs() <= 1e-9 {
            return Ok(self.gs[k as usize].clone());
        }
        let k = (x.floor() as usize).min(self.len() - 2);
        let w = x - k as f64;
        Ok(&self.gs[k] * T::of_f64(1.0 - w) + &self.gs[k + 1] * T::of_f64(w))
    }
}

fn decompose_in_algebra<T: Scalar>(rep: &MatrixRep<T>, x: &DMatrix<T>, t: f64) -> Result<Vec<f64>> {
    rep.decompose(x).map_err(|_| Error::Leakage {
        leakage: rep
            .decompose_with_residual(x)
            .map(|(_, r)| r)
            .unwrap_or(f64::NAN),
        t,
        tolerance: crate::rep::DECOMPOSE_TOL,
    })
}

// Ad(g) (b + shift), with g⁻¹ supplied
fn transformed<T: Scalar>(
    rep: &MatrixRep<T>,
    g: &DMatrix<T>,
    ginv: &DMatrix<T>,
    b: &[f64],
    shift: &[f64],
) -> Result<Vec<f64>> {
    let ad = rep.ad_group_with_inverse(g, ginv)?;
    let v = nalgebra::DVector::from_iterator(b.len(), b.iter().zip(shift).map(|(b, s)| b + s));
    Ok((ad * v).as_slice().to_vec())
}

/// `b̄ = Ad(g′) b − [ġ′ g′⁻¹]` sampled on the gauge grid; `ḡ = g′ g` solves
/// the group equation driven by `b̄`.
pub fn gauge_transform_coefficients<T: Scalar>(
    rep: &MatrixRep<T>,
    gauge: &GaugeCurve<T>,
    b: &CoefficientCurve,
) -> Result<CoefficientCurve> {
    let r = rep.dim();
    if b.dim() != r {
        return Err(Error::dim(MODULE, r, b.dim()));
    }
    let logs = gauge.right_log_derivative(rep)?;
    let mut values = Vec::with_capacity(gauge.len());
    for (k, &t) in gauge.ts.iter().enumerate() {
        let bt = b.eval(t)?;
        let g = &gauge.gs[k];
        let ginv = invert(g, MODULE)?;
        let ad = rep.ad_group_with_inverse(g, &ginv)?;
        let adb = ad * nalgebra::DVector::from_column_slice(&bt);
        values.push(adb.iter().zip(&logs[k]).map(|(a, l)| a - l).collect());
    }
    CoefficientCurve::sampled(gauge.ts.clone(), values)
}

/// Local sections `G/H → G` used to lift particular solutions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Section {
    /// Homographies, base point 0: `[[1, x₁], [0, 1]]`. Stabilizer `{M1, M2}`.
    Translation,
    /// Homographies, base point ∞: `[[1, 0], [1/x₁, 1]]`. Stabilizer
    /// `{M0, M1}`. Undefined where `x₁ = 0`.
    Cotranslation,
    /// Affine line, base point 0: `[[1, x₁], [0, 1]]`. Stabilizer `{a1}`.
    AffineTranslation,
    /// Affine group modulo translations: `diag(y, 1)` with `y ≠ 0`.
    /// Stabilizer `{a0}`.
    AffineDilation,
    /// Heisenberg phase plane, base point the origin: translation by
    /// `(x₁, p₁)`. Stabilizer `{M0}`.
    PhaseTranslation,
}

impl Section {
    pub fn from_tag(tag: &str) -> Result<Self> {
        Ok(match tag {
            "translation" => Section::Translation,
            "cotranslation" => Section::Cotranslation,
            "affine-translation" => Section::AffineTranslation,
            "affine-dilation" => Section::AffineDilation,
            "phase-translation" => Section::PhaseTranslation,
            _ => return Err(Error::Format(format!("unknown section '{tag}'"))),
        })
    }

    /// The default section for an action.
    pub fn for_action(kind: ActionKind) -> Self {
        match kind {
            ActionKind::Sl2Homography => Section::Translation,
            ActionKind::AffineLine => Section::AffineTranslation,
            ActionKind::HeisenbergPlane => Section::PhaseTranslation,
        }
    }

    pub fn rep(&self) -> RealRep {
        match self {
            Section::Translation | Section::Cotranslation => RealRep::sl2_defining(),
            Section::AffineTranslation | Section::AffineDilation => RealRep::affine_2x2(),
            Section::PhaseTranslation => RealRep::heisenberg_upper(),
        }
    }

    /// Basis indices of the stabilizer of the base point.
    pub fn stabilizer(&self) -> Vec<usize> {
        match self {
            Section::Translation => vec![1, 2],
            Section::Cotranslation => vec![0, 1],
            Section::AffineTranslation => vec![1],
            Section::AffineDilation => vec![0],
            Section::PhaseTranslation => vec![0],
        }
    }

    pub fn point_dim(&self) -> usize {
        match self {
            Section::PhaseTranslation => 2,
            _ => 1,
        }
    }

    /// Group element over the chart point `x`.
    pub fn element(&self, x: &[f64], t: f64) -> Result<DMatrix<f64>> {
        if x.len() != self.point_dim() {
            return Err(Error::dim(MODULE, self.point_dim(), x.len()));
        }
        let chart_exit = || Error::ChartExit {
            module: MODULE,
            t: Some(t),
        };
        // ∞ is the base point of the cotranslation chart
        let allowed =
            |v: &f64| v.is_finite() || (*self == Section::Cotranslation && v.is_infinite());
        if !x.iter().all(allowed) {
            return Err(chart_exit());
        }
        Ok(match self {
            Section::Translation | Section::AffineTranslation => {
                DMatrix::from_row_slice(2, 2, &[1.0, x[0], 0.0, 1.0])
            }
            Section::Cotranslation => {
                if x[0].abs() < 1e-12 {
                    return Err(chart_exit());
                }
                DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 1.0 / x[0], 1.0])
            }
            Section::AffineDilation => {
                if x[0].abs() < 1e-12 {
                    return Err(chart_exit());
                }
                DMatrix::from_row_slice(2, 2, &[x[0], 0.0, 0.0, 1.0])
            }
            Section::PhaseTranslation => {
                DMatrix::from_row_slice(3, 3, &[1.0, 0.0, x[0], 0.0, 1.0, x[1], 0.0, 0.0, 1.0])
            }
        })
    }
}

/// Lifts a sampled particular solution through a section.
pub fn lift_with_section(
    section: Section,
    ts: &[f64],
    values: &[Vec<f64>],
) -> Result<GaugeCurve<f64>> {
    if ts.len() != values.len() {
        return Err(Error::Grid {
            module: MODULE,
            reason: format!("{} times for {} points", ts.len(), values.len()),
        });
    }
    let gs = ts
        .iter()
        .zip(values)
        .map(|(&t, x)| section.element(x, t))
        .collect::<Result<Vec<_>>>()?;
    GaugeCurve::new(ts.to_vec(), gs)
}

/// Lifts a propagated solution through the default section of its action.
pub fn lift_solution(action: &HomogeneousAction, x_sol: &PointCurve) -> Result<GaugeCurve<f64>> {
    if x_sol.kind != action.kind() {
        return Err(Error::WrongGroup(format!(
            "curve of {} lifted through {}",
            x_sol.kind.tag(),
            action.kind().tag()
        )));
    }
    let values = x_sol.chart_values()?;
    lift_with_section(Section::for_action(action.kind()), &x_sol.ts, &values)
}

/// Lifts two distinct Riccati solutions at once: `g(t)` maps `0 ↦ x₁(t)` and
/// `∞ ↦ x₂(t)`, so the remaining freedom is the diagonal subgroup `{M1}`.
pub fn lift_pair(ts: &[f64], x1: &[f64], x2: &[f64]) -> Result<GaugeCurve<f64>> {
    if ts.len() != x1.len() || ts.len() != x2.len() {
        return Err(Error::Grid {
            module: MODULE,
            reason: "solutions and grid differ in length".into(),
        });
    }
    let gs = ts
        .iter()
        .zip(x1.iter().zip(x2))
        .map(|(&t, (&a, &b))| {
            let d = b - a;
            if !(d.abs() >= 1e-12) || !d.is_finite() {
                return Err(Error::ChartExit {
                    module: MODULE,
                    t: Some(t),
                });
            }
            let s = d.signum();
            let n = d.abs().sqrt();
            Ok(DMatrix::from_row_slice(
                2,
                2,
                &[b / n, s * a / n, 1.0 / n, s / n],
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    GaugeCurve::new(ts.to_vec(), gs)
}

/// The reduced equation for `h` in a subgroup.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedSystem {
    pub indices: Vec<usize>,
    pub ts: Vec<f64>,
    /// All `r` components of `b_h` at each node.
    pub full: Vec<Vec<f64>>,
    /// Largest absolute component outside the subalgebra.
    pub leakage: f64,
}

impl ReducedSystem {
    /// Components on the subalgebra, in the order of `indices`.
    pub fn restricted(&self) -> Result<CoefficientCurve> {
        let values = self
            .full
            .iter()
            .map(|b| self.indices.iter().map(|&i| b[i]).collect())
            .collect();
        CoefficientCurve::sampled(self.ts.clone(), values)
    }

    /// Full-dimensional curve (zeros outside the subalgebra are kept as
    /// computed, so leakage is visible).
    pub fn full_curve(&self) -> Result<CoefficientCurve> {
        CoefficientCurve::sampled(self.ts.clone(), self.full.clone())
    }

    /// CSV `t,bh<i>…` for the subalgebra components, with the leakage as a
    /// comment.
    pub fn to_csv(&self) -> String {
        let mut header = vec!["t".to_string()];
        header.extend(self.indices.iter().map(|i| format!("bh{i}")));
        let rows = self.ts.iter().zip(&self.full).map(|(t, b)| {
            let mut row = vec![*t];
            row.extend(self.indices.iter().map(|&i| b[i]));
            row
        });
        let idx: Vec<String> = self.indices.iter().map(|i| i.to_string()).collect();
        io::write_csv(
            &header,
            rows,
            &[
                format!("subalgebra={}", idx.join(",")),
                format!("leakage={}", io::fmt_f64(self.leakage)),
            ],
        )
    }
}

/// `b_h = Ad(g₁⁻¹)(b + [ġ₁ g₁⁻¹])` on the lift's grid. Fails if the
/// components outside `indices` exceed [`LEAKAGE_TOL`].
pub fn reduce_to_subgroup<T: Scalar>(
    rep: &MatrixRep<T>,
    b: &CoefficientCurve,
    g1: &GaugeCurve<T>,
    indices: &[usize],
) -> Result<ReducedSystem> {
    let r = rep.dim();
    if b.dim() != r {
        return Err(Error::dim(MODULE, r, b.dim()));
    }
    if let Some(&bad) = indices.iter().find(|&&i| i >= r) {
        return Err(Error::IndexOutOfRange {
            module: MODULE,
            index: bad,
            dim: r,
        });
    }
    if !rep.algebra().is_subalgebra(indices) {
        return Err(Error::NotSubalgebra(format!(
            "indices {indices:?} do not span a subalgebra"
        )));
    }
    let logs = g1.right_log_derivative(rep)?;
    let mut full = Vec::with_capacity(g1.len());
    let mut leakage: f64 = 0.0;
    for (k, &t) in g1.ts.iter().enumerate() {
        let bt = b.eval(t)?;
        let g = &g1.gs[k];
        let ginv = invert(g, MODULE)?;
        let bh = transformed(rep, &ginv, g, &bt, &logs[k])?;
        let leak = (0..r)
            .filter(|i| !indices.contains(i))
            .map(|i| bh[i].abs())
            .fold(0.0, f64::max);
        if leak > LEAKAGE_TOL {
            return Err(Error::Leakage {
                leakage: leak,
                t,
                tolerance: LEAKAGE_TOL,
            });
        }
        leakage = leakage.max(leak);
        full.push(bh);
    }
    Ok(ReducedSystem {
        indices: indices.to_vec(),
        ts: g1.ts.clone(),
        full,
        leakage,
    })
}

/// Pointwise `g₁(t) h(t)` on the grid of `h`; `g₁` is interpolated when
/// the grids differ.
pub fn reassemble<T: Scalar>(
    g1: &GaugeCurve<T>,
    h: &GroupTrajectory<T>,
) -> Result<GroupTrajectory<T>> {
    if g1.gs[0].nrows() != h.size() {
        return Err(Error::dim(MODULE, g1.gs[0].nrows(), h.size()));
    }
    let gs =
        h.ts.iter()
            .zip(&h.gs)
            .map(|(&t, hk)| Ok(g1.at(t)? * hk))
            .collect::<Result<Vec<_>>>()?;
    GroupTrajectory::new(h.ts.clone(), gs)
}

/// Output of [`reduce_and_solve`].
#[derive(Debug, Clone)]
pub struct Reduction<T: Scalar> {
    pub reduced: ReducedSystem,
    /// `h(t)` with `h(0) = g₁(0)⁻¹`.
    pub h: GroupTrajectory<T>,
    /// `g₁(t) h(t)`, a solution of the original group equation from `I`.
    pub g: GroupTrajectory<T>,
}

/// Full pipeline: reduce, integrate the subgroup equation on every other
/// node of the lift's grid (so RK4 midpoints are lift nodes), and
/// reassemble.
pub fn reduce_and_solve<T: Scalar>(
    rep: &MatrixRep<T>,
    b: &CoefficientCurve,
    g1: &GaugeCurve<T>,
    indices: &[usize],
) -> Result<Reduction<T>> {
    let reduced = reduce_to_subgroup(rep, b, g1, indices)?;
    if g1.len() < 3 || g1.len().is_multiple_of(2) {
        return Err(Error::Grid {
            module: MODULE,
            reason: "lift grid needs an odd number (≥ 3) of nodes".into(),
        });
    }
    let mut bh_sub = reduced.full.clone();
    for b in &mut bh_sub {
        for (i, v) in b.iter_mut().enumerate() {
            if !indices.contains(&i) {
                *v = 0.0;
            }
        }
    }
    let curve = CoefficientCurve::sampled(reduced.ts.clone(), bh_sub)?;
    let coarse: Vec<f64> = g1.ts.iter().copied().step_by(2).collect();
    let from_identity = solve_group_on_grid(rep, &curve, &coarse)?;
    let h = right_translate(&from_identity, &invert(&g1.gs[0], MODULE)?)?;
    let g = reassemble(g1, &h)?;
    Ok(Reduction { reduced, h, g })
}
