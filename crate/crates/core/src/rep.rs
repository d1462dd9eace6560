//! Matrix representations of Lie algebras and the induced group maps.

use crate::algebra::LieAlgebra;
use crate::error::{Error, Result};
use crate::scalar::{vectorize, Scalar};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Homomorphism tolerance, scaled by `1 + ‖M_α‖‖M_β‖`.
pub const HOMOMORPHISM_TOL: f64 = 1e-10;
/// Least-squares residual allowed when decomposing a matrix in the basis.
pub const DECOMPOSE_TOL: f64 = 1e-8;

/// Which manifold invariants the group generated by a representation
/// preserves. Detected from the generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GroupProps {
    /// All generators traceless: `det g = 1`.
    pub special: bool,
    /// Real antisymmetric generators: `gᵀg = I`.
    pub orthogonal: bool,
    /// Anti-Hermitian generators: `g†g = I`.
    pub unitary: bool,
}

#[derive(Debug, Clone)]
pub struct MatrixRep<T: Scalar> {
    algebra: LieAlgebra,
    mats: Vec<DMatrix<T>>,
    /// Pseudo-inverse of the vectorized basis, `r × len(vec)`.
    pinv: DMatrix<f64>,
    basis: DMatrix<f64>,
    props: GroupProps,
}

pub type RealRep = MatrixRep<f64>;
pub type ComplexRep = MatrixRep<Complex64>;

impl<T: Scalar> MatrixRep<T> {
    /// Validates shapes, the homomorphism property and linear independence
    /// of the generators.
    pub fn new(algebra: LieAlgebra, mats: Vec<DMatrix<T>>) -> Result<Self> {
        let r = algebra.dim();
        if mats.len() != r {
            return Err(Error::dim("lie-core", r, mats.len()));
        }
        let n = mats[0].nrows();
        for m in &mats {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::Representation(format!(
                    "generator of shape {}x{} in a {n}x{n} representation",
                    m.nrows(),
                    m.ncols()
                )));
            }
        }

        let cols: Vec<Vec<f64>> = mats.iter().map(vectorize).collect();
        let len = cols[0].len();
        let basis = DMatrix::from_fn(len, r, |i, a| cols[a][i]);
        let svd = basis.clone().svd(true, true);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        if smin <= 1e-10 * smax.max(1.0) {
            return Err(Error::Representation(
                "generators are linearly dependent".into(),
            ));
        }
        let pinv = svd
            .pseudo_inverse(0.0)
            .map_err(|e| Error::Representation(e.to_string()))?;

        let props = detect_props(&mats);
        let rep = MatrixRep {
            algebra,
            mats,
            pinv,
            basis,
            props,
        };
        let worst = rep.homomorphism_violation();
        if worst > 0.0 {
            return Err(Error::Representation(format!(
                "bracket relations violated (scaled excess {worst:e})"
            )));
        }
        Ok(rep)
    }

    /// Largest `‖[M_α,M_β] − Σ f M_γ‖ − tol·(1+‖M_α‖‖M_β‖)`, clamped at 0.
    pub fn homomorphism_violation(&self) -> f64 {
        let r = self.dim();
        let mut worst: f64 = 0.0;
        for a in 0..r {
            for b in 0..r {
                let comm = &self.mats[a] * &self.mats[b] - &self.mats[b] * &self.mats[a];
                let mut rhs = DMatrix::<T>::zeros(self.size(), self.size());
                for g in 0..r {
                    let c = self.algebra.f(a, b, g);
                    if c != 0.0 {
                        rhs += &self.mats[g] * T::of_f64(c);
                    }
                }
                let err = (comm - rhs).norm();
                let tol = HOMOMORPHISM_TOL * (1.0 + self.mats[a].norm() * self.mats[b].norm());
                worst = worst.max(err - tol);
            }
        }
        worst
    }

    /// Raw bracket residual `max ‖[M_α,M_β] − Σ f M_γ‖_F`.
    pub fn bracket_residual(&self) -> f64 {
        let r = self.dim();
        let mut worst: f64 = 0.0;
        for a in 0..r {
            for b in 0..r {
                let mut d = &self.mats[a] * &self.mats[b] - &self.mats[b] * &self.mats[a];
                for g in 0..r {
                    d -= &self.mats[g] * T::of_f64(self.algebra.f(a, b, g));
                }
                worst = worst.max(d.norm());
            }
        }
        worst
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.algebra
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    /// Matrix size `n`.
    pub fn size(&self) -> usize {
        self.mats[0].nrows()
    }

    pub fn mats(&self) -> &[DMatrix<T>] {
        &self.mats
    }

    pub fn props(&self) -> GroupProps {
        self.props
    }

    /// `Σ c_α M_α`.
    pub fn element(&self, coeffs: &[f64]) -> Result<DMatrix<T>> {
        if coeffs.len() != self.dim() {
            return Err(Error::dim("lie-core", self.dim(), coeffs.len()));
        }
        let n = self.size();
        let mut m = DMatrix::zeros(n, n);
        for (c, mat) in coeffs.iter().zip(&self.mats) {
            if *c != 0.0 {
                m += mat * T::of_f64(*c);
            }
        }
        Ok(m)
    }

    /// Coefficients of `x` in the basis, with the least-squares residual.
    pub fn decompose_with_residual(&self, x: &DMatrix<T>) -> Result<(Vec<f64>, f64)> {
        let n = self.size();
        if x.nrows() != n || x.ncols() != n {
            return Err(Error::dim("lie-core", n, x.nrows()));
        }
        let v = DVector::from_vec(vectorize(x));
        let c = &self.pinv * &v;
        let resid = (&self.basis * &c - &v).norm();
        Ok((c.as_slice().to_vec(), resid))
    }

    /// Coefficients of `x` in the basis; fails when `x` is not (numerically)
    /// in the span of the generators.
    pub fn decompose(&self, x: &DMatrix<T>) -> Result<Vec<f64>> {
        let (c, resid) = self.decompose_with_residual(x)?;
        if resid > DECOMPOSE_TOL * (1.0 + x.norm()) {
            return Err(Error::Representation(format!(
                "matrix not in the span of the generators (residual {resid:e})"
            )));
        }
        Ok(c)
    }

    /// `Ad(g)` as an `r × r` matrix: `g M_α g⁻¹ = Σ_γ A[γ][α] M_γ`.
    pub fn ad_group(&self, g: &DMatrix<T>) -> Result<DMatrix<f64>> {
        let ginv = invert(g, "lie-core")?;
        self.ad_group_with_inverse(g, &ginv)
    }

    pub(crate) fn ad_group_with_inverse(
        &self,
        g: &DMatrix<T>,
        ginv: &DMatrix<T>,
    ) -> Result<DMatrix<f64>> {
        let r = self.dim();
        let mut out = DMatrix::zeros(r, r);
        for a in 0..r {
            let conj = g * &self.mats[a] * ginv;
            let c = self.decompose(&conj)?;
            for g_idx in 0..r {
                out[(g_idx, a)] = c[g_idx];
            }
        }
        Ok(out)
    }

    /// Distance of `g` from the group manifold, measured by every invariant
    /// the generators preserve (determinant, orthogonality, unitarity).
    pub fn manifold_drift(&self, g: &DMatrix<T>) -> f64 {
        let n = self.size();
        let id = DMatrix::<T>::identity(n, n);
        let mut drift: f64 = 0.0;
        if self.props.special {
            drift = drift.max((g.clone().determinant() - T::of_f64(1.0)).modulus());
        }
        if self.props.orthogonal {
            drift = drift.max((g.transpose() * g - &id).norm());
        }
        if self.props.unitary {
            drift = drift.max((g.adjoint() * g - &id).norm());
        }
        drift
    }
}

fn detect_props<T: Scalar>(mats: &[DMatrix<T>]) -> GroupProps {
    let tol = 1e-12;
    let special = mats.iter().all(|m| m.trace().modulus() <= tol);
    let orthogonal = !T::IS_COMPLEX && mats.iter().all(|m| (m + m.transpose()).norm() <= tol);
    let unitary = T::IS_COMPLEX && mats.iter().all(|m| (m + m.adjoint()).norm() <= tol);
    GroupProps {
        special,
        orthogonal,
        unitary,
    }
}

/// Inverse with a determinant guard.
pub fn invert<T: Scalar>(g: &DMatrix<T>, module: &'static str) -> Result<DMatrix<T>> {
    if g.nrows() != g.ncols() {
        return Err(Error::dim(module, g.nrows(), g.ncols()));
    }
    let det = g.clone().determinant().modulus();
    if !(det > 1e-300) {
        return Err(Error::Singular { module, t: None });
    }
    g.clone()
        .try_inverse()
        .ok_or(Error::Singular { module, t: None })
}

fn real(n: usize, rows: &[f64]) -> DMatrix<f64> {
    DMatrix::from_row_slice(n, n, rows)
}

fn unit_matrix(n: usize, i: usize, j: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    m[(i, j)] = 1.0;
    m
}

impl MatrixRep<f64> {
    /// Defining representation of sl(2,R): `M0 = [[0,1],[0,0]]`,
    /// `M1 = ½ diag(1,−1)`, `M2 = [[0,0],[−1,0]]`.
    pub fn sl2_defining() -> Self {
        let mats = vec![
            real(2, &[0.0, 1.0, 0.0, 0.0]),
            real(2, &[0.5, 0.0, 0.0, -0.5]),
            real(2, &[0.0, 0.0, -1.0, 0.0]),
        ];
        Self::new(LieAlgebra::sl2(), mats).expect("sl2 representation is valid")
    }

    /// Affine group of the line as matrices `[[α1, α0], [0, 1]]`.
    pub fn affine_2x2() -> Self {
        let mats = vec![unit_matrix(2, 0, 1), unit_matrix(2, 0, 0)];
        Self::new(LieAlgebra::affine(), mats).expect("affine representation is valid")
    }

    /// Rotation generators of so(3).
    pub fn so3_defining() -> Self {
        let mats = vec![
            real(3, &[0.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 1.0, 0.0]),
            real(3, &[0.0, 0.0, 1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0]),
            real(3, &[0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
        ];
        Self::new(LieAlgebra::so3(), mats).expect("so3 representation is valid")
    }

    /// Heisenberg group as upper unitriangular 3×3 matrices acting on
    /// `(x, p, 1)ᵀ`. The generators are chosen so that the fundamental
    /// fields are `p∂x`, `∂p`, `∂x`.
    pub fn heisenberg_upper() -> Self {
        let mats = vec![
            -unit_matrix(3, 0, 1),
            -unit_matrix(3, 1, 2),
            -unit_matrix(3, 0, 2),
        ];
        Self::new(LieAlgebra::heisenberg(), mats).expect("h3 representation is valid")
    }

    /// Faithful 4×4 strictly upper-triangular representation of the
    /// extended algebra: `a1 = E23`, `a2 = E01 + E12`, `a3 = −E13`,
    /// `a4 = −E03`.
    pub fn heisenberg_extended_upper() -> Self {
        let mats = vec![
            unit_matrix(4, 2, 3),
            unit_matrix(4, 0, 1) + unit_matrix(4, 1, 2),
            -unit_matrix(4, 1, 3),
            -unit_matrix(4, 0, 3),
        ];
        Self::new(LieAlgebra::heisenberg_extended(), mats).expect("h4 representation is valid")
    }

    /// Defining representation of gl(n) by the elementary matrices `E_ij`.
    pub fn gl_defining(n: usize) -> Self {
        let mats = (0..n)
            .flat_map(|i| (0..n).map(move |j| unit_matrix(n, i, j)))
            .collect();
        Self::new(LieAlgebra::gl(n), mats).expect("gl(n) representation is valid")
    }
}

impl MatrixRep<Complex64> {
    /// su(2) generators `−iσ_k/2`, with the so(3) structure constants.
    pub fn su2_pauli() -> Self {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let z = c(0.0, 0.0);
        let mats = vec![
            DMatrix::from_row_slice(2, 2, &[z, c(0.0, -0.5), c(0.0, -0.5), z]),
            DMatrix::from_row_slice(2, 2, &[z, c(-0.5, 0.0), c(0.5, 0.0), z]),
            DMatrix::from_row_slice(2, 2, &[c(0.0, -0.5), z, z, c(0.0, 0.5)]),
        ];
        Self::new(LieAlgebra::so3(), mats).expect("su2 representation is valid")
    }
}

/// A representation with either real or complex entries, as selected at run
/// time (files, CLI tags).
#[derive(Debug, Clone)]
pub enum AnyRep {
    Real(RealRep),
    Complex(ComplexRep),
}

impl AnyRep {
    /// Builtin tags: `sl2-defining`, `affine-2x2`, `so3-defining`,
    /// `su2-pauli`, `h3-upper`, `h4-upper`, `gl<n>-defining`.
    pub fn builtin(tag: &str) -> Result<Self> {
        Ok(match tag {
            "sl2-defining" | "sl2" => AnyRep::Real(RealRep::sl2_defining()),
            "affine-2x2" | "affine" => AnyRep::Real(RealRep::affine_2x2()),
            "so3-defining" | "so3" => AnyRep::Real(RealRep::so3_defining()),
            "su2-pauli" | "su2" => AnyRep::Complex(ComplexRep::su2_pauli()),
            "h3-upper" | "h3" => AnyRep::Real(RealRep::heisenberg_upper()),
            "h4-upper" | "h4" => AnyRep::Real(RealRep::heisenberg_extended_upper()),
            t if t.starts_with("gl") => {
                let digits = t[2..].trim_end_matches("-defining");
                let n: usize = digits
                    .parse()
                    .map_err(|_| Error::Format(format!("unknown representation tag '{tag}'")))?;
                if n == 0 {
                    return Err(Error::Format("gl(0) is empty".into()));
                }
                AnyRep::Real(RealRep::gl_defining(n))
            }
            _ => return Err(Error::Format(format!("unknown representation tag '{tag}'"))),
        })
    }

    pub fn algebra(&self) -> &LieAlgebra {
        match self {
            AnyRep::Real(r) => r.algebra(),
            AnyRep::Complex(r) => r.algebra(),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            AnyRep::Real(r) => r.size(),
            AnyRep::Complex(r) => r.size(),
        }
    }
}
