//! Superposition rules: linear, affine, Riccati (projective) and the planar
//! sl(2) system `ẋ = b0 + b1 x + b2 (x² − y²)`, `ẏ = b1 y + 2 b2 x y`.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use std::fmt;

const MODULE: &str = "superposition";

/// Relative tolerance for projective equality.
pub const PROJECTIVE_TOL: f64 = 1e-12;
/// `|D|` below this is a pole of the planar formula.
pub const POLE_TOL: f64 = 1e-12;
/// Gram determinant threshold for a fundamental set.
pub const GRAM_TOL: f64 = 1e-12;

/// A point `p/q` of the compactified real line; `(1, 0)` is ∞.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectivePoint {
    p: f64,
    q: f64,
}

impl ProjectivePoint {
    pub const INFINITY: ProjectivePoint = ProjectivePoint { p: 1.0, q: 0.0 };

    pub fn new(p: f64, q: f64) -> Result<Self> {
        if !p.is_finite() || !q.is_finite() {
            return Err(Error::NonFinite {
                module: MODULE,
                t: None,
            });
        }
        if p == 0.0 && q == 0.0 {
            return Err(Error::Degenerate {
                module: MODULE,
                reason: "(0, 0) is not a projective point".into(),
            });
        }
        Ok(if q == 0.0 {
            Self::INFINITY
        } else {
            ProjectivePoint { p: p / q, q: 1.0 }
        })
    }

    /// `x` itself, or ∞ for infinite input.
    pub fn finite(x: f64) -> Self {
        if x.is_infinite() {
            Self::INFINITY
        } else {
            ProjectivePoint { p: x, q: 1.0 }
        }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn is_infinite(&self) -> bool {
        self.q == 0.0
    }

    /// Affine value `p/q` (`+∞` for the point at infinity).
    pub fn value(&self) -> f64 {
        if self.is_infinite() {
            f64::INFINITY
        } else {
            self.p
        }
    }

    /// `p_a q_b − p_b q_a`.
    pub fn det(&self, other: &Self) -> f64 {
        self.p * other.q - other.p * self.q
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        let scale = self.p.hypot(self.q) * other.p.hypot(other.q);
        self.det(other).abs() <= tol * scale.max(1.0)
    }
}

impl fmt::Display for ProjectivePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.p)
        }
    }
}

/// Families of superposition rules with their arity `m` and number of
/// constants `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuperpositionRule {
    Linear { n: usize },
    Affine { n: usize },
    Riccati,
    PlanarSl2,
}

impl SuperpositionRule {
    pub fn arity(&self) -> usize {
        match *self {
            SuperpositionRule::Linear { n } => n,
            SuperpositionRule::Affine { n } => n + 1,
            SuperpositionRule::Riccati | SuperpositionRule::PlanarSl2 => 3,
        }
    }

    pub fn constants(&self) -> usize {
        match *self {
            SuperpositionRule::Linear { n } | SuperpositionRule::Affine { n } => n,
            SuperpositionRule::Riccati => 1,
            SuperpositionRule::PlanarSl2 => 2,
        }
    }

    /// Dimension of the points the rule combines.
    pub fn point_dim(&self) -> usize {
        match *self {
            SuperpositionRule::Linear { n } | SuperpositionRule::Affine { n } => n,
            SuperpositionRule::Riccati => 1,
            SuperpositionRule::PlanarSl2 => 2,
        }
    }

    /// Applies the rule to points given as plain vectors.
    pub fn apply(&self, solutions: &[Vec<f64>], k: &[f64]) -> Result<Vec<f64>> {
        self.check_points(solutions)?;
        if k.len() != self.constants() {
            return Err(Error::dim(MODULE, self.constants(), k.len()));
        }
        match self {
            SuperpositionRule::Linear { .. } => superpose_linear(solutions, k),
            SuperpositionRule::Affine { .. } => superpose_affine(solutions, k),
            SuperpositionRule::Riccati => {
                let pts: Vec<ProjectivePoint> = solutions
                    .iter()
                    .map(|s| ProjectivePoint::finite(s[0]))
                    .collect();
                let x = superpose_riccati(pts[0], pts[1], pts[2], ProjectivePoint::finite(k[0]))?;
                Ok(vec![x.value()])
            }
            SuperpositionRule::PlanarSl2 => {
                let s = |i: usize| [solutions[i][0], solutions[i][1]];
                Ok(superpose_planar_sl2(s(0), s(1), s(2), k[0], k[1])?.to_vec())
            }
        }
    }

    fn check_points(&self, solutions: &[Vec<f64>]) -> Result<()> {
        if solutions.len() != self.arity() {
            return Err(Error::dim(MODULE, self.arity(), solutions.len()));
        }
        let d = self.point_dim();
        if let Some(s) = solutions.iter().find(|s| s.len() != d) {
            return Err(Error::dim(MODULE, d, s.len()));
        }
        Ok(())
    }
}

fn gram_check(vectors: &[DVector<f64>]) -> Result<DMatrix<f64>> {
    let n = vectors.len();
    let m = DMatrix::from_columns(vectors);
    let gram = m.transpose() * &m;
    let det = gram.determinant();
    if !(det.abs() >= GRAM_TOL) {
        return Err(Error::Degenerate {
            module: MODULE,
            reason: format!("{n} solutions are linearly dependent (Gram determinant {det:.3e})"),
        });
    }
    Ok(m)
}

/// `Σ k_a x_(a)` over a fundamental set of `n` solutions in `ℝⁿ`.
pub fn superpose_linear(solutions: &[Vec<f64>], k: &[f64]) -> Result<Vec<f64>> {
    let n = solutions.len();
    if k.len() != n {
        return Err(Error::dim(MODULE, n, k.len()));
    }
    let cols: Vec<DVector<f64>> = solutions
        .iter()
        .map(|s| DVector::from_column_slice(s))
        .collect();
    if let Some(c) = cols.iter().find(|c| c.len() != n) {
        return Err(Error::dim(MODULE, n, c.len()));
    }
    let m = gram_check(&cols)?;
    Ok((m * DVector::from_column_slice(k)).as_slice().to_vec())
}

/// `x_(1) + Σ_j k_j (x_(j+1) − x_(1))` over `n + 1` solutions in `ℝⁿ`.
pub fn superpose_affine(solutions: &[Vec<f64>], k: &[f64]) -> Result<Vec<f64>> {
    let (first, rest) = solutions
        .split_first()
        .ok_or_else(|| Error::dim(MODULE, k.len() + 1, 0))?;
    let n = rest.len();
    if k.len() != n {
        return Err(Error::dim(MODULE, n, k.len()));
    }
    let x1 = DVector::from_column_slice(first);
    let diffs = rest
        .iter()
        .map(|s| {
            if s.len() != x1.len() {
                return Err(Error::dim(MODULE, x1.len(), s.len()));
            }
            Ok(DVector::from_column_slice(s) - &x1)
        })
        .collect::<Result<Vec<_>>>()?;
    if n == 0 {
        return Ok(first.clone());
    }
    let m = gram_check(&diffs)?;
    Ok((x1 + m * DVector::from_column_slice(k)).as_slice().to_vec())
}

fn check_distinct(points: &[ProjectivePoint]) -> Result<()> {
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if points[i].approx_eq(&points[j], PROJECTIVE_TOL) {
                return Err(Error::Degenerate {
                    module: MODULE,
                    reason: format!("particular solutions {} and {} coincide", i + 1, j + 1),
                });
            }
        }
    }
    Ok(())
}

/// `x = [x1(x3 − x2) + k x2(x1 − x3)] / [(x3 − x2) + k(x1 − x3)]`, evaluated
/// in homogeneous coordinates so that `k = ∞` and poles are exact.
pub fn superpose_riccati(
    x1: ProjectivePoint,
    x2: ProjectivePoint,
    x3: ProjectivePoint,
    k: ProjectivePoint,
) -> Result<ProjectivePoint> {
    check_distinct(&[x1, x2, x3])?;
    let a = k.q() * x3.det(&x2);
    let b = k.p() * x1.det(&x3);
    ProjectivePoint::new(a * x1.p() + b * x2.p(), a * x1.q() + b * x2.q())
}

/// The constant `k = (x − x1)(x3 − x2) / ((x − x2)(x3 − x1))`, the inverse of
/// [`superpose_riccati`].
pub fn cross_ratio(
    x: ProjectivePoint,
    x1: ProjectivePoint,
    x2: ProjectivePoint,
    x3: ProjectivePoint,
) -> Result<ProjectivePoint> {
    check_distinct(&[x1, x2, x3])?;
    ProjectivePoint::new(x.det(&x1) * x3.det(&x2), x.det(&x2) * x3.det(&x1))
}

/// `N_x`, `N_y` and `D` of the planar rule as coefficients of
/// `1, k1, k2, k1² + k2²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarTerms {
    pub nx: [f64; 4],
    pub ny: [f64; 4],
    pub d: [f64; 4],
}

impl PlanarTerms {
    pub fn new(s1: [f64; 2], s2: [f64; 2], s3: [f64; 2]) -> Self {
        let [x1, y1] = s1;
        let [x2, y2] = s2;
        let [x3, y3] = s3;
        let sq = |a: f64| a * a;
        let d23 = sq(x2 - x3) + sq(y2 - y3);
        let d13 = sq(x1 - x3) + sq(y1 - y3);

        let nx = [
            x1 * d23,
            sq(x2) * x3 + (x3 - x2) * sq(x1) + sq(y1 - y2) * x3
                - x2 * (sq(x3) + sq(y1 - y3))
                - x1 * d23,
            sq(x3) * (y2 - y1) + sq(x2) * (y1 - y3) + (y3 - y2) * (sq(x1) + (y1 - y2) * (y1 - y3)),
            x2 * d13,
        ];
        let ny = [
            y1 * d23,
            sq(x2) * (y3 - y1) - sq(x3) * (y1 + y2)
                + 2.0 * x2 * (x3 * y1 - x1 * y3)
                + 2.0 * x1 * x3 * y2
                - (sq(x1) + (y1 + y2) * (y1 - y3)) * (y2 - y3),
            sq(x1) * (x2 - x3) + sq(x2) * x3 + x3 * (sq(y2) - sq(y1))
                - x2 * (sq(x3) + sq(y3) - sq(y1))
                + x1 * (sq(x3) - sq(x2) + sq(y3) - sq(y2)),
            y2 * d13,
        ];
        let d = [
            d23,
            -2.0 * ((x1 - x3) * (x2 - x3) + (y1 - y3) * (y2 - y3)),
            2.0 * (x3 * (y2 - y1) + x2 * (y1 - y3) + x1 * (y3 - y2)),
            d13,
        ];
        PlanarTerms { nx, ny, d }
    }

    fn eval(c: &[f64; 4], k1: f64, k2: f64) -> f64 {
        c[0] + k1 * c[1] + k2 * c[2] + (k1 * k1 + k2 * k2) * c[3]
    }

    // derivatives with respect to (k1, k2)
    fn grad(c: &[f64; 4], k1: f64, k2: f64) -> [f64; 2] {
        [c[1] + 2.0 * k1 * c[3], c[2] + 2.0 * k2 * c[3]]
    }

    /// `(N_x, N_y, D)` at `(k1, k2)`.
    pub fn at(&self, k1: f64, k2: f64) -> (f64, f64, f64) {
        (
            Self::eval(&self.nx, k1, k2),
            Self::eval(&self.ny, k1, k2),
            Self::eval(&self.d, k1, k2),
        )
    }
}

/// `(N_x / D, N_y / D)` for three particular solutions `s_i = (x_i, y_i)`.
pub fn superpose_planar_sl2(
    s1: [f64; 2],
    s2: [f64; 2],
    s3: [f64; 2],
    k1: f64,
    k2: f64,
) -> Result<[f64; 2]> {
    let (nx, ny, d) = PlanarTerms::new(s1, s2, s3).at(k1, k2);
    if !(d.abs() >= POLE_TOL) {
        return Err(Error::Pole(d.abs()));
    }
    Ok([nx / d, ny / d])
}

const NEWTON_MAX_ITER: usize = 100;
const NEWTON_TOL: f64 = 1e-10;

/// Damped Newton on `(N_x/D − x, N_y/D − y) = 0`, started from `k = (0, 0)`
/// and restarted from a few other seeds if it stalls. Iterating on the
/// rational form keeps Newton away from the common zero of `N` and `D` at
/// the pole; convergence is judged on `(N_x − x D, N_y − y D)`.
fn fit_planar(s1: [f64; 2], s2: [f64; 2], s3: [f64; 2], target: [f64; 2]) -> Result<[f64; 2]> {
    let terms = PlanarTerms::new(s1, s2, s3);
    let [x, y] = target;
    let polynomial = |k: [f64; 2]| -> [f64; 2] {
        let (nx, ny, d) = terms.at(k[0], k[1]);
        [nx - x * d, ny - y * d]
    };
    let rational = |k: [f64; 2]| -> Option<[f64; 2]> {
        let (nx, ny, d) = terms.at(k[0], k[1]);
        (d.abs() >= POLE_TOL).then(|| [nx / d - x, ny / d - y])
    };
    let norm = |r: [f64; 2]| r[0].hypot(r[1]);
    let seeds = [
        [0.0, 0.0],
        [1.0, 0.0],
        [0.0, 1.0],
        [-1.0, 0.0],
        [0.0, -1.0],
        [1.0, 1.0],
    ];
    let mut best = f64::INFINITY;
    for seed in seeds {
        let mut k = seed;
        let Some(mut r) = rational(k) else { continue };
        for _ in 0..NEWTON_MAX_ITER {
            if norm(polynomial(k)) <= NEWTON_TOL {
                break;
            }
            let (nx, ny, d) = terms.at(k[0], k[1]);
            let gx = PlanarTerms::grad(&terms.nx, k[0], k[1]);
            let gy = PlanarTerms::grad(&terms.ny, k[0], k[1]);
            let gd = PlanarTerms::grad(&terms.d, k[0], k[1]);
            let quotient = |n: f64, gn: [f64; 2], i: usize| (gn[i] * d - n * gd[i]) / (d * d);
            let j = [
                [quotient(nx, gx, 0), quotient(nx, gx, 1)],
                [quotient(ny, gy, 0), quotient(ny, gy, 1)],
            ];
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            if !(det.abs() > 1e-300) {
                break;
            }
            let step = [
                (j[1][1] * r[0] - j[0][1] * r[1]) / det,
                (j[0][0] * r[1] - j[1][0] * r[0]) / det,
            ];
            let mut lambda = 1.0;
            loop {
                let trial = [k[0] - lambda * step[0], k[1] - lambda * step[1]];
                match rational(trial) {
                    Some(rt) if norm(rt) < norm(r) => {
                        k = trial;
                        r = rt;
                        break;
                    }
                    _ if lambda < 1e-8 => break,
                    _ => lambda *= 0.5,
                }
            }
            if lambda < 1e-8 {
                break;
            }
        }
        let res = norm(polynomial(k));
        best = best.min(res);
        if res <= NEWTON_TOL && terms.at(k[0], k[1]).2.abs() >= POLE_TOL {
            return Ok(k);
        }
    }
    Err(Error::NonConvergence {
        module: MODULE,
        iterations: NEWTON_MAX_ITER,
        residual: best,
    })
}

/// Constants `k` for which the rule reproduces `target` from the given
/// values of the particular solutions (all at the same time). Riccati
/// returns `+∞` when the target is the second solution.
pub fn fit_constants(
    rule: SuperpositionRule,
    solutions: &[Vec<f64>],
    target: &[f64],
) -> Result<Vec<f64>> {
    rule.check_points(solutions)?;
    if target.len() != rule.point_dim() {
        return Err(Error::dim(MODULE, rule.point_dim(), target.len()));
    }
    let solve = |cols: Vec<DVector<f64>>, rhs: DVector<f64>| -> Result<Vec<f64>> {
        let m = gram_check(&cols)?;
        m.lu()
            .solve(&rhs)
            .map(|k| k.as_slice().to_vec())
            .ok_or(Error::Singular {
                module: MODULE,
                t: None,
            })
    };
    match rule {
        SuperpositionRule::Linear { .. } => solve(
            solutions
                .iter()
                .map(|s| DVector::from_column_slice(s))
                .collect(),
            DVector::from_column_slice(target),
        ),
        SuperpositionRule::Affine { .. } => {
            let x1 = DVector::from_column_slice(&solutions[0]);
            solve(
                solutions[1..]
                    .iter()
                    .map(|s| DVector::from_column_slice(s) - &x1)
                    .collect(),
                DVector::from_column_slice(target) - &x1,
            )
        }
        SuperpositionRule::Riccati => {
            let p = |x: f64| ProjectivePoint::finite(x);
            let k = cross_ratio(
                p(target[0]),
                p(solutions[0][0]),
                p(solutions[1][0]),
                p(solutions[2][0]),
            )?;
            Ok(vec![k.value()])
        }
        SuperpositionRule::PlanarSl2 => {
            let s = |i: usize| [solutions[i][0], solutions[i][1]];
            Ok(fit_planar(s(0), s(1), s(2), [target[0], target[1]])?.to_vec())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pp(x: f64) -> ProjectivePoint {
        ProjectivePoint::finite(x)
    }

    #[test]
    fn projective_canonical_form() {
        let a = ProjectivePoint::new(3.0, 2.0).unwrap();
        assert_eq!((a.p(), a.q()), (1.5, 1.0));
        assert!(ProjectivePoint::new(-2.0, 0.0).unwrap().is_infinite());
        assert!(ProjectivePoint::new(0.0, 0.0).is_err());
        assert_eq!(pp(f64::NEG_INFINITY), ProjectivePoint::INFINITY);
    }

    #[test]
    fn riccati_distinguished_constants() {
        let (x1, x2, x3) = (pp(0.2), pp(-1.0), pp(4.0));
        assert_eq!(superpose_riccati(x1, x2, x3, pp(0.0)).unwrap(), x1);
        assert_eq!(
            superpose_riccati(x1, x2, x3, ProjectivePoint::INFINITY).unwrap(),
            x2
        );
        assert!(superpose_riccati(x1, x2, x3, pp(1.0))
            .unwrap()
            .approx_eq(&x3, 1e-15));
    }

    #[test]
    fn riccati_with_infinite_inputs() {
        let inf = ProjectivePoint::INFINITY;
        let x = superpose_riccati(pp(1.0), inf, pp(3.0), pp(0.5)).unwrap();
        // (x − 1) / (3 − 1) = k when x2 = ∞
        assert!((x.value() - 2.0).abs() < 1e-15);
        let k = cross_ratio(x, pp(1.0), inf, pp(3.0)).unwrap();
        assert!((k.value() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn coincident_points_rejected() {
        assert!(matches!(
            superpose_riccati(pp(1.0), pp(1.0), pp(2.0), pp(0.5)),
            Err(Error::Degenerate { .. })
        ));
    }

    #[test]
    fn linear_and_affine() {
        let x = superpose_linear(&[vec![1.0, 0.0], vec![0.0, 1.0]], &[2.0, 3.0]).unwrap();
        assert_eq!(x, vec![2.0, 3.0]);
        assert!(superpose_linear(&[vec![1.0, 2.0], vec![2.0, 4.0]], &[1.0, 1.0]).is_err());
        let x = superpose_affine(&[vec![2.0], vec![5.0]], &[1.0]).unwrap();
        assert_eq!(x, vec![5.0]);
        let x = superpose_affine(&[vec![2.0], vec![5.0]], &[0.0]).unwrap();
        assert_eq!(x, vec![2.0]);
    }

    #[test]
    fn planar_pole() {
        // coincident inputs make D vanish identically
        assert!(matches!(
            superpose_planar_sl2([1.0, 1.0], [1.0, 1.0], [1.0, 1.0], 0.3, 0.2),
            Err(Error::Pole(_))
        ));
    }

    #[test]
    fn rule_shapes() {
        assert_eq!(SuperpositionRule::Affine { n: 2 }.arity(), 3);
        assert_eq!(SuperpositionRule::PlanarSl2.constants(), 2);
        assert!(SuperpositionRule::Riccati
            .apply(&[vec![0.0], vec![1.0]], &[0.5])
            .is_err());
    }

    #[test]
    fn fit_linear_and_riccati() {
        let sols = vec![vec![1.0, 1.0], vec![0.0, 2.0]];
        let k = fit_constants(SuperpositionRule::Linear { n: 2 }, &sols, &[1.0, 1.0]).unwrap();
        assert!((k[0] - 1.0).abs() < 1e-15 && k[1].abs() < 1e-15);
        let sols = vec![vec![0.1], vec![0.4], vec![2.0]];
        let k = fit_constants(SuperpositionRule::Riccati, &sols, &[0.1]).unwrap();
        assert_eq!(k, vec![0.0]);
    }
}
