//! Particle in a time-dependent linear potential `H = p²/2m + f(t) x`.

use crate::algebra::LieAlgebra;
use crate::curve::{CoefficientCurve, ScalarDrive};
use crate::error::{Error, Result};
use crate::flow::solve_group_direct;
use crate::homogeneous::{HomogeneousAction, Point};
use crate::io::{read_csv, write_csv};
use crate::ode::{cumulative_simpson, uniform_grid};
use crate::rep::RealRep;
use crate::wei_norman::{quadrature_solve, reconstruct, CanonicalCoords};
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

const MODULE: &str = "physics";

/// Probability mass allowed in the outer 1/32 of the grid on each side
/// before the result is flagged as possibly aliased.
pub const ALIASING_TOL: f64 = 1e-8;

/// Factor order `exp(−u₄a₄) exp(−u₃a₃) exp(−u₂a₂) exp(−u₁a₁)`.
pub const U_ORDER: [usize; 4] = [3, 2, 1, 0];
/// Factor order `exp(−v₄a₄) exp(−v₂a₂) exp(−v₃a₃) exp(−v₁a₁)`.
pub const V_ORDER: [usize; 4] = [3, 1, 2, 0];

#[derive(Debug, Clone, PartialEq)]
pub struct LinearPotentialDrive {
    /// One-component curve `f(t)`.
    pub force: CoefficientCurve,
    pub mass: f64,
}

impl LinearPotentialDrive {
    pub fn new(force: CoefficientCurve, mass: f64) -> Result<Self> {
        if force.dim() != 1 {
            return Err(Error::dim(MODULE, 1, force.dim()));
        }
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::InvalidWindow {
                module: MODULE,
                reason: format!("mass must be positive, got {mass}"),
            });
        }
        Ok(Self { force, mass })
    }

    pub fn constant(mass: f64, f0: f64) -> Result<Self> {
        Self::new(
            CoefficientCurve::Builtin(vec![ScalarDrive::Const(f0)]),
            mass,
        )
    }

    /// `f(t) = qE₀ + qE cos ωt`.
    pub fn cosine(mass: f64, q: f64, e0: f64, e: f64, omega: f64) -> Result<Self> {
        Self::new(
            CoefficientCurve::Builtin(vec![ScalarDrive::cosine(q * e0, q * e, omega)]),
            mass,
        )
    }

    pub fn force_at(&self, t: f64) -> Result<f64> {
        Ok(self.force.eval(t)?[0])
    }

    /// `b = (1/m, −f, 0, …)` padded with zeros to `dim` components.
    fn coefficients(&self, dim: usize) -> CoefficientCurve {
        let inv_m = 1.0 / self.mass;
        let pad = dim - 2;
        match &self.force {
            CoefficientCurve::Constant(f) => {
                let mut b = vec![inv_m, -f[0]];
                b.extend(std::iter::repeat_n(0.0, pad));
                CoefficientCurve::Constant(b)
            }
            CoefficientCurve::Builtin(d) => {
                let mut b = vec![ScalarDrive::Const(inv_m), d[0].scaled(-1.0)];
                b.extend(std::iter::repeat_n(ScalarDrive::Const(0.0), pad));
                CoefficientCurve::Builtin(b)
            }
            CoefficientCurve::Sampled { ts, values } => CoefficientCurve::Sampled {
                ts: ts.clone(),
                values: values
                    .iter()
                    .map(|f| {
                        let mut b = vec![inv_m, -f[0]];
                        b.extend(std::iter::repeat_n(0.0, pad));
                        b
                    })
                    .collect(),
            },
        }
    }

    /// Coefficients on the Heisenberg algebra (phase-plane action).
    pub fn heisenberg_coefficients(&self) -> CoefficientCurve {
        self.coefficients(3)
    }

    /// Coefficients on the extended algebra (quantum propagator).
    pub fn extended_coefficients(&self) -> CoefficientCurve {
        self.coefficients(4)
    }

    /// `∫₀ᵗ f` and `∫₀ᵗ∫₀ˢ f` on the grid used by the solvers.
    pub fn impulses(&self, t_end: f64, dt: f64) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
        let ts = uniform_grid(0.0, t_end, dt, MODULE)?;
        self.force.check_window(0.0, t_end)?;
        let steps = ts.len() - 1;
        let h = t_end / (2 * steps).max(1) as f64;
        let fs = (0..=2 * steps)
            .map(|k| self.force_at(k as f64 * h))
            .collect::<Result<Vec<_>>>()?;
        let big_f = cumulative_simpson(&fs, h);
        let big_g = cumulative_simpson(&big_f, h);
        Ok((
            ts,
            big_f.into_iter().step_by(2).collect(),
            big_g.into_iter().step_by(2).collect(),
        ))
    }
}

/// Phase-space trajectory with the two constants of motion
/// `I₁ = p + ∫f` and `I₂ = x − (p + ∫f) t/m + ∫∫f / m`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalMotion {
    pub ts: Vec<f64>,
    pub xs: Vec<f64>,
    pub ps: Vec<f64>,
    pub i1: Vec<f64>,
    pub i2: Vec<f64>,
}

impl ClassicalMotion {
    pub fn max_i1_drift(&self) -> f64 {
        drift(&self.i1)
    }

    pub fn max_i2_drift(&self) -> f64 {
        drift(&self.i2)
    }

    /// Columns `t,x,p,I1,I2`.
    pub fn to_csv(&self) -> String {
        let header: Vec<String> = ["t", "x", "p", "I1", "I2"].map(String::from).to_vec();
        let rows = (0..self.ts.len())
            .map(|k| [self.ts[k], self.xs[k], self.ps[k], self.i1[k], self.i2[k]]);
        write_csv(&header, rows, &[])
    }
}

fn drift(xs: &[f64]) -> f64 {
    xs.iter().map(|x| (x - xs[0]).abs()).fold(0.0, f64::max)
}

/// Solves the Heisenberg group equation and acts on `(x₀, p₀)`.
pub fn classical_linear_potential(
    drive: &LinearPotentialDrive,
    x0: f64,
    p0: f64,
    t_end: f64,
    dt: f64,
) -> Result<ClassicalMotion> {
    let action = HomogeneousAction::heisenberg_plane();
    let traj = solve_group_direct(action.rep(), &drive.heisenberg_coefficients(), t_end, dt)?;
    let curve = action.propagate(&traj, &Point::Plane([x0, p0]))?;
    let (ts, big_f, big_g) = drive.impulses(t_end, dt)?;
    let m = drive.mass;
    let mut motion = ClassicalMotion {
        ts: Vec::with_capacity(ts.len()),
        xs: Vec::with_capacity(ts.len()),
        ps: Vec::with_capacity(ts.len()),
        i1: Vec::with_capacity(ts.len()),
        i2: Vec::with_capacity(ts.len()),
    };
    for (k, xp) in curve.chart_values()?.into_iter().enumerate() {
        let (t, x, p) = (ts[k], xp[0], xp[1]);
        let i1 = p + big_f[k];
        motion.ts.push(t);
        motion.xs.push(x);
        motion.ps.push(p);
        motion.i1.push(i1);
        motion.i2.push(x - i1 * t / m + big_g[k] / m);
    }
    Ok(motion)
}

/// Wavefunction sampled on `p_j = p_min + j Δp`, `j < N`, `N` a power of two.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumWavefunction {
    p_min: f64,
    dp: f64,
    psi: Vec<Complex64>,
}

impl MomentumWavefunction {
    pub fn new(p_min: f64, dp: f64, psi: Vec<Complex64>) -> Result<Self> {
        if !psi.len().is_power_of_two() {
            return Err(Error::Grid {
                module: MODULE,
                reason: format!("grid size {} is not a power of two", psi.len()),
            });
        }
        if !(dp > 0.0 && dp.is_finite() && p_min.is_finite()) {
            return Err(Error::Grid {
                module: MODULE,
                reason: format!("bad grid p_min={p_min}, dp={dp}"),
            });
        }
        if psi.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite {
                module: MODULE,
                t: None,
            });
        }
        Ok(Self { p_min, dp, psi })
    }

    /// Normalized Gaussian `exp(−(p−p₀)²/4σ² − i p x₀)` on the symmetric
    /// grid `[−L, L)` with `n` points.
    pub fn gaussian(n: usize, half_width: f64, p0: f64, sigma: f64, x0: f64) -> Result<Self> {
        let dp = 2.0 * half_width / n as f64;
        let psi = (0..n)
            .map(|j| {
                let p = -half_width + j as f64 * dp;
                let a = -(p - p0).powi(2) / (4.0 * sigma * sigma);
                Complex64::from_polar(a.exp(), -p * x0)
            })
            .collect();
        let mut w = Self::new(-half_width, dp, psi)?;
        w.normalize()?;
        Ok(w)
    }

    pub fn len(&self) -> usize {
        self.psi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.psi.is_empty()
    }

    pub fn dp(&self) -> f64 {
        self.dp
    }

    pub fn p(&self, j: usize) -> f64 {
        self.p_min + j as f64 * self.dp
    }

    pub fn grid(&self) -> Vec<f64> {
        (0..self.len()).map(|j| self.p(j)).collect()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.psi
    }

    pub fn half_width(&self) -> f64 {
        0.5 * self.len() as f64 * self.dp
    }

    /// `Δp Σ |ψ_j|²`.
    pub fn norm(&self) -> f64 {
        self.dp * self.psi.iter().map(|z| z.norm_sqr()).sum::<f64>()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if !(n > 0.0) {
            return Err(Error::Degenerate {
                module: MODULE,
                reason: "zero wavefunction cannot be normalized".into(),
            });
        }
        let s = n.sqrt().recip();
        self.psi.iter_mut().for_each(|z| *z *= s);
        Ok(())
    }

    /// `⟨p⟩ = Δp Σ p_j |ψ_j|² / norm`.
    pub fn mean_momentum(&self) -> f64 {
        let num: f64 = (0..self.len())
            .map(|j| self.p(j) * self.psi[j].norm_sqr())
            .sum();
        self.dp * num / self.norm()
    }

    /// Probability in the outer `N/32` points (at least one) on each side.
    pub fn edge_mass(&self) -> f64 {
        let w = (self.len() / 32).max(1);
        let n = self.len();
        let idx = (0..w).chain(n.saturating_sub(w)..n);
        self.dp * idx.map(|j| self.psi[j].norm_sqr()).sum::<f64>()
    }

    /// `ψ(p − s)` by band-limited interpolation.
    pub fn shifted(&self, s: f64) -> Self {
        let n = self.len();
        let mut buf = self.psi.clone();
        let mut planner = FftPlanner::<f64>::new();
        planner.plan_fft_forward(n).process(&mut buf);
        let span = n as f64 * self.dp;
        for (k, z) in buf.iter_mut().enumerate() {
            let wave = if k <= n / 2 {
                k as f64
            } else {
                k as f64 - n as f64
            };
            let kappa = 2.0 * PI * wave / span;
            if n > 1 && 2 * k == n {
                // Nyquist mode: keep the interpolant real-symmetric.
                *z *= (kappa * s).cos();
            } else {
                *z *= Complex64::from_polar(1.0, -kappa * s);
            }
        }
        planner.plan_fft_inverse(n).process(&mut buf);
        let scale = 1.0 / n as f64;
        buf.iter_mut().for_each(|z| *z *= scale);
        Self {
            p_min: self.p_min,
            dp: self.dp,
            psi: buf,
        }
    }

    /// Columns `p,re,im`.
    pub fn to_csv(&self) -> String {
        let header: Vec<String> = ["p", "re", "im"].map(String::from).to_vec();
        let rows = (0..self.len()).map(|j| [self.p(j), self.psi[j].re, self.psi[j].im]);
        write_csv(&header, rows, &[])
    }

    /// Reads `p,re,im`; the grid must be uniform.
    pub fn from_csv(text: &str) -> Result<Self> {
        let table = read_csv(text)?;
        let col = |name: &str| {
            table
                .column(name)
                .ok_or_else(|| Error::Format(format!("wavefunction file: missing column '{name}'")))
        };
        let (ps, re, im) = (col("p")?, col("re")?, col("im")?);
        if ps.len() < 2 {
            return Err(Error::Format(
                "wavefunction file: need at least two rows".into(),
            ));
        }
        let dp = (ps[ps.len() - 1] - ps[0]) / (ps.len() - 1) as f64;
        let uniform = ps
            .iter()
            .enumerate()
            .all(|(j, p)| (p - (ps[0] + j as f64 * dp)).abs() <= 1e-9 * dp.abs().max(1.0));
        if !uniform {
            return Err(Error::Format(
                "wavefunction file: p grid is not uniform".into(),
            ));
        }
        let psi = re
            .iter()
            .zip(&im)
            .map(|(&a, &b)| Complex64::new(a, b))
            .collect();
        Self::new(ps[0], dp, psi)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumEvolution {
    pub psi: MomentumWavefunction,
    /// `(v₁, v₂, v₃, v₄)` at the final time.
    pub coords: [f64; 4],
    /// Set when either the initial or the final state has edge mass above
    /// [`ALIASING_TOL`].
    pub aliasing: bool,
}

/// `ψ(p,t) = e^{iv₄} e^{i(v₃(p−v₂) − v₁(p−v₂)²/2)} ψ₀(p − v₂)`, with `v`
/// the coordinates of the propagator in [`V_ORDER`]. In momentum space
/// `a₁ ↦ ip²/2`, `a₂ ↦ d/dp`, `a₃ ↦ −ip`, `a₄ ↦ −i`.
pub fn quantum_linear_potential(
    drive: &LinearPotentialDrive,
    psi0: &MomentumWavefunction,
    t_end: f64,
    dt: f64,
) -> Result<QuantumEvolution> {
    let coords = quadrature_solve(
        &LieAlgebra::heisenberg_extended(),
        &V_ORDER,
        &drive.extended_coefficients(),
        t_end,
        dt,
    )?;
    let v = coords.last();
    let (v1, v2, v3, v4) = (v[0], v[1], v[2], v[3]);
    let limit = psi0.half_width() / 4.0;
    if v2.abs() > limit {
        return Err(Error::GridTooSmall { shift: v2, limit });
    }
    let mut psi = psi0.shifted(v2);
    for (j, z) in psi.psi.iter_mut().enumerate() {
        let q = psi0.p(j) - v2;
        *z *= Complex64::from_polar(1.0, v4 + v3 * q - 0.5 * v1 * q * q);
    }
    let aliasing = psi0.edge_mass() > ALIASING_TOL || psi.edge_mass() > ALIASING_TOL;
    Ok(QuantumEvolution {
        psi,
        coords: [v1, v2, v3, v4],
        aliasing,
    })
}

/// Both factorizations of the propagator and the largest Frobenius gap
/// between their reconstructions in the 4×4 representation.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagatorFactors {
    pub u: CanonicalCoords,
    pub v: CanonicalCoords,
    pub gap: f64,
}

pub fn propagator_factors(
    drive: &LinearPotentialDrive,
    t_end: f64,
    dt: f64,
) -> Result<PropagatorFactors> {
    let alg = LieAlgebra::heisenberg_extended();
    let b = drive.extended_coefficients();
    if t_end == 0.0 {
        let at_origin = |order: &[usize]| CanonicalCoords {
            order: order.to_vec(),
            ts: vec![0.0],
            vs: vec![vec![0.0; 4]],
        };
        return Ok(PropagatorFactors {
            u: at_origin(&U_ORDER),
            v: at_origin(&V_ORDER),
            gap: 0.0,
        });
    }
    let u = quadrature_solve(&alg, &U_ORDER, &b, t_end, dt)?;
    let v = quadrature_solve(&alg, &V_ORDER, &b, t_end, dt)?;
    let rep = RealRep::heisenberg_extended_upper();
    let gu = reconstruct(&rep, &u)?;
    let gv = reconstruct(&rep, &v)?;
    let gap = gu.max_distance(&gv)?;
    Ok(PropagatorFactors { u, v, gap })
}
