//! Matrix exponential by scaling and squaring with a Taylor kernel.

use crate::error::{Error, Result};
use crate::scalar::{is_finite, Scalar};
use nalgebra::DMatrix;

/// Scaled norm target before the Taylor sum.
const THETA: f64 = 0.5;
const MAX_TERMS: usize = 40;

fn norm1<T: Scalar>(m: &DMatrix<T>) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|z| z.modulus()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `exp(m)` for a square matrix.
pub fn expm<T: Scalar>(m: &DMatrix<T>) -> Result<DMatrix<T>> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::dim("lie-core", n, m.ncols()));
    }
    if !is_finite(m) {
        return Err(Error::NonFinite {
            module: "lie-core",
            t: None,
        });
    }
    let norm = norm1(m);
    let squarings = if norm > THETA {
        (norm / THETA).log2().ceil() as i32
    } else {
        0
    };
    let scale = T::of_f64(0.5f64.powi(squarings));
    let a = m * scale;

    let mut sum = DMatrix::<T>::identity(n, n);
    let mut term = DMatrix::<T>::identity(n, n);
    for k in 1..=MAX_TERMS {
        term = &term * &a * T::of_f64(1.0 / k as f64);
        sum += &term;
        if norm1(&term) <= f64::EPSILON * 1e-3 * norm1(&sum) {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn zero_gives_identity() {
        let e = expm(&DMatrix::<f64>::zeros(3, 3)).unwrap();
        assert_eq!(e, DMatrix::identity(3, 3));
    }

    #[test]
    fn nilpotent_series_terminates() {
        let nmat = DMatrix::from_row_slice(3, 3, &[0.0, 1.5, -0.7, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0]);
        let want = DMatrix::identity(3, 3) + &nmat + (&nmat * &nmat) * 0.5;
        let got = expm(&nmat).unwrap();
        assert!((got - want).norm() < 1e-14);
    }

    #[test]
    fn rotation_generator() {
        // M3 of so(3): rotation about z
        let m3 = DMatrix::from_row_slice(3, 3, &[0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        for &t in &[0.3, 1.7, -2.5, 9.0] {
            let (s, c) = f64::sin_cos(t);
            let want = DMatrix::from_row_slice(3, 3, &[c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0]);
            let got = expm(&(&m3 * t)).unwrap();
            assert!((got - want).norm() < 1e-13, "t={t}");
        }
    }

    #[test]
    fn diagonal_relative_error() {
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![10.0, -3.0, 0.25]));
        let e = expm(&d).unwrap();
        for (i, x) in [10.0f64, -3.0, 0.25].iter().enumerate() {
            assert!((e[(i, i)] - x.exp()).abs() <= 1e-12 * x.exp());
        }
    }

    #[test]
    fn complex_phase() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(0.0, 0.8),
            Complex64::new(0.0, -0.8),
        ]));
        let e = expm(&m).unwrap();
        assert!((e[(0, 0)] - Complex64::from_polar(1.0, 0.8)).norm() < 1e-14);
    }

    #[test]
    fn non_finite_rejected() {
        let m = DMatrix::from_row_slice(1, 1, &[f64::NAN]);
        assert!(matches!(expm(&m), Err(Error::NonFinite { .. })));
    }
}
