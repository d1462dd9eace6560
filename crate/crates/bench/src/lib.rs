//! Shared problem setups for the benchmarks in `benches/`.

use lieflow_core::{CoefficientCurve, RealRep};
use nalgebra::DMatrix;

/// Smooth sl(2) drive used by the solver benchmarks.
pub fn sl2_drive() -> CoefficientCurve {
    CoefficientCurve::parse("cos,0.3,sin").expect("valid grammar")
}

/// Linear-potential drive on h4: `b = (1/m, −f, 0, 0)`.
pub fn h4_drive() -> CoefficientCurve {
    CoefficientCurve::parse("0.5,cos:-0.8:2+-0.2,0,0").expect("valid grammar")
}

/// A generic element of gl(n) with entries of size about one.
pub fn dense_matrix(n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| ((i * n + j) as f64 * 0.7).sin())
}

pub fn sl2() -> RealRep {
    RealRep::sl2_defining()
}
