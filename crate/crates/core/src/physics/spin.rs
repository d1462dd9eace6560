//! Spin-1/2 in a time-dependent magnetic field.

use crate::curve::CoefficientCurve;
use crate::error::{Error, Result};
use crate::flow::{solve_group_direct, GroupTrajectory};
use crate::rep::{ComplexRep, RealRep};
use nalgebra::{DMatrix, Vector2};
use num_complex::Complex64;

const MODULE: &str = "physics";

/// Field components `B¹, B², B³` and the coupling `μ`.
///
/// The Pauli equation `iψ̇ = −(μ/2) B·σ ψ` is the group equation on SU(2)
/// with `b = μB` in the basis `−iσ_k/2`; the same `b` drives SO(3).
#[derive(Debug, Clone, PartialEq)]
pub struct MagneticDrive {
    pub field: CoefficientCurve,
    pub mu: f64,
}

impl MagneticDrive {
    pub fn new(field: CoefficientCurve, mu: f64) -> Result<Self> {
        if field.dim() != 3 {
            return Err(Error::dim(MODULE, 3, field.dim()));
        }
        if !mu.is_finite() {
            return Err(Error::InvalidWindow {
                module: MODULE,
                reason: format!("coupling must be finite, got {mu}"),
            });
        }
        Ok(Self { field, mu })
    }

    /// Group-equation coefficients `b = μB`.
    pub fn coefficients(&self) -> CoefficientCurve {
        let mu = self.mu;
        match &self.field {
            CoefficientCurve::Constant(b) => {
                CoefficientCurve::Constant(b.iter().map(|x| mu * x).collect())
            }
            CoefficientCurve::Builtin(d) => {
                CoefficientCurve::Builtin(d.iter().map(|s| s.scaled(mu)).collect())
            }
            CoefficientCurve::Sampled { ts, values } => CoefficientCurve::Sampled {
                ts: ts.clone(),
                values: values
                    .iter()
                    .map(|v| v.iter().map(|x| mu * x).collect())
                    .collect(),
            },
        }
    }
}

#[derive(Debug, Clone)]
pub struct SpinEvolution {
    pub rotation: GroupTrajectory<f64>,
    pub spinor: GroupTrajectory<Complex64>,
}

impl SpinEvolution {
    /// `ψ(t) = R̄(t) ψ(0)` at every grid time.
    pub fn apply_to_spinor(&self, psi0: [Complex64; 2]) -> Vec<[Complex64; 2]> {
        let v = Vector2::new(psi0[0], psi0[1]);
        self.spinor
            .gs
            .iter()
            .map(|g| {
                let w = g.fixed_view::<2, 2>(0, 0) * v;
                [w[0], w[1]]
            })
            .collect()
    }

    /// Largest `‖R̄†R̄ − I‖` along the curve.
    pub fn unitarity_violation(&self) -> f64 {
        let id = DMatrix::<Complex64>::identity(2, 2);
        self.spinor
            .gs
            .iter()
            .map(|g| (g.adjoint() * g - &id).norm())
            .fold(0.0, f64::max)
    }

    /// Largest `‖RᵀR − I‖` along the curve.
    pub fn orthogonality_violation(&self) -> f64 {
        let id = DMatrix::<f64>::identity(3, 3);
        self.rotation
            .gs
            .iter()
            .map(|g| (g.transpose() * g - &id).norm())
            .fold(0.0, f64::max)
    }

    /// Largest `‖Ad(R̄) − R‖`: conjugating the `−iσ_k/2` basis by `R̄`
    /// gives the rotation matrix of the double cover.
    pub fn covering_error(&self) -> Result<f64> {
        let su2 = ComplexRep::su2_pauli();
        let mut worst = 0.0f64;
        for (rb, r) in self.spinor.gs.iter().zip(&self.rotation.gs) {
            worst = worst.max((su2.ad_group(rb)? - r).norm());
        }
        Ok(worst)
    }
}

/// Solves the SO(3) and SU(2) group equations for the same drive.
pub fn spin_evolution(drive: &MagneticDrive, t_end: f64, dt: f64) -> Result<SpinEvolution> {
    let b = drive.coefficients();
    let rotation = solve_group_direct(&RealRep::so3_defining(), &b, t_end, dt)?;
    let spinor = solve_group_direct(&ComplexRep::su2_pauli(), &b, t_end, dt)?;
    Ok(SpinEvolution { rotation, spinor })
}

/// SU(2) → SO(3) covering map in the standard bases.
pub fn covering_rotation(rbar: &DMatrix<Complex64>) -> Result<DMatrix<f64>> {
    ComplexRep::su2_pauli().ad_group(rbar)
}
