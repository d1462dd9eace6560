use nalgebra::{ComplexField, DMatrix};
use num_complex::Complex64;
use std::fmt::Debug;

/// Matrix entry type: `f64` for real representations, `Complex64` where the
/// representation needs complex entries (su(2), quantum examples).
pub trait Scalar: ComplexField<RealField = f64> + Copy + Debug + Send + Sync + 'static {
    const IS_COMPLEX: bool;

    fn of_f64(x: f64) -> Self;
    /// Real and imaginary parts.
    fn parts(self) -> (f64, f64);
    /// Builds a value from parts. Real scalars ignore `im`.
    fn from_parts(re: f64, im: f64) -> Self;
}

impl Scalar for f64 {
    const IS_COMPLEX: bool = false;

    fn of_f64(x: f64) -> Self {
        x
    }
    fn parts(self) -> (f64, f64) {
        (self, 0.0)
    }
    fn from_parts(re: f64, _im: f64) -> Self {
        re
    }
}

impl Scalar for Complex64 {
    const IS_COMPLEX: bool = true;

    fn of_f64(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn parts(self) -> (f64, f64) {
        (self.re, self.im)
    }
    fn from_parts(re: f64, im: f64) -> Self {
        Complex64::new(re, im)
    }
}

pub(crate) fn is_finite<T: Scalar>(m: &DMatrix<T>) -> bool {
    m.iter().all(|z| {
        let (re, im) = z.parts();
        re.is_finite() && im.is_finite()
    })
}

/// Real vectorization of a matrix: row-major, complex entries split into
/// (re, im) pairs.
pub(crate) fn vectorize<T: Scalar>(m: &DMatrix<T>) -> Vec<f64> {
    let mut out = Vec::with_capacity(m.len() * if T::IS_COMPLEX { 2 } else { 1 });
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let (re, im) = m[(i, j)].parts();
            out.push(re);
            if T::IS_COMPLEX {
                out.push(im);
            }
        }
    }
    out
}

/// Complex matrices for CLI and I/O purposes are treated uniformly through
/// this conversion.
pub fn to_complex<T: Scalar>(m: &DMatrix<T>) -> DMatrix<Complex64> {
    m.map(|z| {
        let (re, im) = z.parts();
        Complex64::new(re, im)
    })
}
