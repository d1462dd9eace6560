//! Lie systems: time-dependent ODEs whose flow factors through a curve in a
//! finite-dimensional Lie group.
//!
//! The group equation `ġ g⁻¹ = −Σ b_α(t) M_α` is solved directly
//! ([`solve_group_direct`]) or through canonical coordinates of the second
//! kind ([`solve_wei_norman`], [`quadrature_solve`]). Solutions act on
//! homogeneous spaces ([`HomogeneousAction`]), combine through superposition
//! rules ([`superpose_riccati`], [`superpose_planar_sl2`]) and reduce along
//! particular solutions ([`reduce_and_solve`]).

// `!(x > tol)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod curve;
pub mod error;
pub mod expm;
pub mod flow;
pub mod homogeneous;
pub mod io;
pub mod ode;
pub mod physics;
pub mod reduction;
pub mod rep;
pub mod scalar;
pub mod superposition;
pub mod wei_norman;

pub use algebra::{BracketEntry, LieAlgebra};
pub use curve::{CoefficientCurve, ScalarDrive};
pub use error::{Error, Result};
pub use expm::expm;
pub use flow::{solve_group_direct, solve_group_on_grid, GroupTrajectory};
pub use homogeneous::{ActionKind, HomogeneousAction, Point, PointCurve};
pub use reduction::{
    gauge_transform_coefficients, reduce_and_solve, reduce_to_subgroup, GaugeCurve, ReducedSystem,
    Reduction, Section,
};
pub use rep::{AnyRep, ComplexRep, MatrixRep, RealRep};
pub use scalar::Scalar;
pub use superposition::{
    cross_ratio, fit_constants, superpose_affine, superpose_linear, superpose_planar_sl2,
    superpose_riccati, ProjectivePoint, SuperpositionRule,
};
pub use wei_norman::{
    product_of_exponentials, quadrature_plan, quadrature_solve, reconstruct, solve_wei_norman,
    CanonicalCoords, QuadraturePlan,
};
