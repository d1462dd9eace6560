//! Finite-dimensional real Lie algebras given by structure constants.
//!
//! The bracket of basis elements is `[a_α, a_β] = Σ_γ f[α][β][γ] a_γ` with
//! 0-based indices. Construction validates antisymmetry and the Jacobi
//! identity, so every `LieAlgebra` value in circulation is a genuine algebra.

use crate::error::{Error, Result};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// Absolute tolerance for antisymmetry and Jacobi checks.
pub const STRUCTURE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct LieAlgebra {
    dim: usize,
    /// Dense tensor, index `(α * r + β) * r + γ`.
    structure: Vec<f64>,
    labels: Vec<String>,
}

/// One bracket relation `[a_i, a_j] = Σ value·a_γ`, as stored in algebra files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BracketEntry {
    pub i: usize,
    pub j: usize,
    pub coeffs: Vec<(usize, f64)>,
}

impl LieAlgebra {
    /// Builds an algebra from a dense tensor and validates it.
    pub fn new(dim: usize, structure: Vec<f64>, labels: Vec<String>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidAlgebra("dimension must be positive".into()));
        }
        if structure.len() != dim * dim * dim {
            return Err(Error::dim("lie-core", dim * dim * dim, structure.len()));
        }
        let labels = if labels.is_empty() {
            (0..dim).map(|a| format!("a{a}")).collect()
        } else {
            labels
        };
        if labels.len() != dim {
            return Err(Error::dim("lie-core", dim, labels.len()));
        }
        let alg = LieAlgebra {
            dim,
            structure,
            labels,
        };
        alg.validate()?;
        Ok(alg)
    }

    /// Builds an algebra from a list of brackets. Omitted pairs bracket to
    /// zero; the `(j, i)` relation is filled in by antisymmetry.
    pub fn from_brackets(
        dim: usize,
        brackets: &[BracketEntry],
        labels: Vec<String>,
    ) -> Result<Self> {
        let mut f = vec![0.0; dim * dim * dim];
        let mut seen = vec![false; dim * dim];
        for entry in brackets {
            let (i, j) = (entry.i, entry.j);
            for &idx in &[i, j] {
                if idx >= dim {
                    return Err(Error::IndexOutOfRange {
                        module: "lie-core",
                        index: idx,
                        dim,
                    });
                }
            }
            if i == j {
                if entry.coeffs.iter().any(|&(_, c)| c.abs() > STRUCTURE_TOL) {
                    return Err(Error::InvalidAlgebra(format!("[a{i}, a{i}] must vanish")));
                }
                continue;
            }
            if seen[i * dim + j] {
                return Err(Error::InvalidAlgebra(format!(
                    "bracket [a{i}, a{j}] given more than once"
                )));
            }
            seen[i * dim + j] = true;
            seen[j * dim + i] = true;
            for &(g, c) in &entry.coeffs {
                if g >= dim {
                    return Err(Error::IndexOutOfRange {
                        module: "lie-core",
                        index: g,
                        dim,
                    });
                }
                f[(i * dim + j) * dim + g] += c;
                f[(j * dim + i) * dim + g] -= c;
            }
        }
        Self::new(dim, f, labels)
    }

    fn validate(&self) -> Result<()> {
        let r = self.dim;
        for v in &self.structure {
            if !v.is_finite() {
                return Err(Error::InvalidAlgebra(
                    "non-finite structure constant".into(),
                ));
            }
        }
        for a in 0..r {
            for b in 0..r {
                for g in 0..r {
                    let s = self.f(a, b, g) + self.f(b, a, g);
                    if s.abs() > STRUCTURE_TOL {
                        return Err(Error::InvalidAlgebra(format!(
                            "antisymmetry fails at ({a},{b},{g}): {s:e}"
                        )));
                    }
                }
            }
        }
        let worst = self.jacobi_violation();
        if worst > STRUCTURE_TOL {
            return Err(Error::InvalidAlgebra(format!(
                "Jacobi identity violated by {worst:e}"
            )));
        }
        Ok(())
    }

    /// Largest absolute entry of the Jacobiator over all basis triples.
    pub fn jacobi_violation(&self) -> f64 {
        let r = self.dim;
        let mut worst: f64 = 0.0;
        for a in 0..r {
            for b in 0..r {
                for c in 0..r {
                    for n in 0..r {
                        let mut s = 0.0;
                        for m in 0..r {
                            s += self.f(a, b, m) * self.f(m, c, n)
                                + self.f(b, c, m) * self.f(m, a, n)
                                + self.f(c, a, m) * self.f(m, b, n);
                        }
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Structure constant `f^{αβ}_γ`.
    #[inline]
    pub fn f(&self, alpha: usize, beta: usize, gamma: usize) -> f64 {
        self.structure[(alpha * self.dim + beta) * self.dim + gamma]
    }

    /// Non-zero brackets with `i < j`, in the algebra-file layout.
    pub fn brackets(&self) -> Vec<BracketEntry> {
        let r = self.dim;
        let mut out = Vec::new();
        for i in 0..r {
            for j in (i + 1)..r {
                let coeffs: Vec<(usize, f64)> = (0..r)
                    .filter(|&g| self.f(i, j, g) != 0.0)
                    .map(|g| (g, self.f(i, j, g)))
                    .collect();
                if !coeffs.is_empty() {
                    out.push(BracketEntry { i, j, coeffs });
                }
            }
        }
        out
    }

    /// `[x, y]` for coefficient vectors in this basis.
    pub fn bracket(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        let r = self.dim;
        if x.len() != r {
            return Err(Error::dim("lie-core", r, x.len()));
        }
        if y.len() != r {
            return Err(Error::dim("lie-core", r, y.len()));
        }
        let mut z = vec![0.0; r];
        for (a, &xa) in x.iter().enumerate() {
            if xa == 0.0 {
                continue;
            }
            for (b, &yb) in y.iter().enumerate() {
                if yb == 0.0 {
                    continue;
                }
                let w = xa * yb;
                for (g, zg) in z.iter_mut().enumerate() {
                    *zg += w * self.f(a, b, g);
                }
            }
        }
        Ok(z)
    }

    /// Matrix of `ad(a_β)`: entry `(γ, α)` is `f^{βα}_γ`.
    pub fn ad_matrix(&self, beta: usize) -> Result<DMatrix<f64>> {
        let r = self.dim;
        if beta >= r {
            return Err(Error::IndexOutOfRange {
                module: "lie-core",
                index: beta,
                dim: r,
            });
        }
        Ok(DMatrix::from_fn(r, r, |g, a| self.f(beta, a, g)))
    }

    /// `ad(x)` for a general element.
    pub fn ad_of(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let r = self.dim;
        if x.len() != r {
            return Err(Error::dim("lie-core", r, x.len()));
        }
        let mut m = DMatrix::zeros(r, r);
        for (b, &xb) in x.iter().enumerate() {
            if xb != 0.0 {
                m += self.ad_matrix(b)? * xb;
            }
        }
        Ok(m)
    }

    /// True when the span of the given basis elements is closed under the
    /// bracket (checked on structure constants).
    pub fn is_subalgebra(&self, indices: &[usize]) -> bool {
        let inside = |g: usize| indices.contains(&g);
        for &a in indices {
            for &b in indices {
                if a >= self.dim || b >= self.dim {
                    return false;
                }
                for g in 0..self.dim {
                    if !inside(g) && self.f(a, b, g).abs() > STRUCTURE_TOL {
                        return false;
                    }
                }
            }
        }
        true
    }

    // ---- builtin algebras ----

    /// gl(n) in the basis `E_ij`, index `i*n + j`:
    /// `[E_ij, E_kl] = δ_jk E_il − δ_il E_kj`.
    pub fn gl(n: usize) -> Self {
        let r = n * n;
        let mut f = vec![0.0; r * r * r];
        let idx = |i: usize, j: usize| i * n + j;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let (a, b) = (idx(i, j), idx(k, l));
                        if j == k {
                            f[(a * r + b) * r + idx(i, l)] += 1.0;
                        }
                        if i == l {
                            f[(a * r + b) * r + idx(k, j)] -= 1.0;
                        }
                    }
                }
            }
        }
        let labels = (0..n)
            .flat_map(|i| (0..n).map(move |j| format!("E{i}{j}")))
            .collect();
        Self::new(r, f, labels).expect("gl(n) constants are valid")
    }

    /// Affine algebra of the line: `[a0, a1] = −a0`.
    pub fn affine() -> Self {
        Self::from_brackets(
            2,
            &[BracketEntry {
                i: 0,
                j: 1,
                coeffs: vec![(0, -1.0)],
            }],
            vec!["a0".into(), "a1".into()],
        )
        .expect("affine constants are valid")
    }

    /// sl(2,R) in the basis `M0, M1, M2`:
    /// `[M0,M1] = −M0`, `[M0,M2] = −2 M1`, `[M1,M2] = −M2`.
    pub fn sl2() -> Self {
        Self::from_brackets(
            3,
            &[
                BracketEntry {
                    i: 0,
                    j: 1,
                    coeffs: vec![(0, -1.0)],
                },
                BracketEntry {
                    i: 0,
                    j: 2,
                    coeffs: vec![(1, -2.0)],
                },
                BracketEntry {
                    i: 1,
                    j: 2,
                    coeffs: vec![(2, -1.0)],
                },
            ],
            vec!["M0".into(), "M1".into(), "M2".into()],
        )
        .expect("sl2 constants are valid")
    }

    /// so(3) ≅ su(2): `[M1,M2] = M3` and cyclic (stored 0-based).
    pub fn so3() -> Self {
        Self::from_brackets(
            3,
            &[
                BracketEntry {
                    i: 0,
                    j: 1,
                    coeffs: vec![(2, 1.0)],
                },
                BracketEntry {
                    i: 1,
                    j: 2,
                    coeffs: vec![(0, 1.0)],
                },
                BracketEntry {
                    i: 2,
                    j: 0,
                    coeffs: vec![(1, 1.0)],
                },
            ],
            vec!["M1".into(), "M2".into(), "M3".into()],
        )
        .expect("so3 constants are valid")
    }

    /// Heisenberg algebra of the classical linear potential:
    /// `[a1, a2] = −a3`, all other brackets zero.
    pub fn heisenberg() -> Self {
        Self::from_brackets(
            3,
            &[BracketEntry {
                i: 0,
                j: 1,
                coeffs: vec![(2, -1.0)],
            }],
            vec!["a1".into(), "a2".into(), "a3".into()],
        )
        .expect("h3 constants are valid")
    }

    /// Four-dimensional extension of the quantum linear potential:
    /// `[a1, a2] = a3`, `[a2, a3] = a4`.
    pub fn heisenberg_extended() -> Self {
        Self::from_brackets(
            4,
            &[
                BracketEntry {
                    i: 0,
                    j: 1,
                    coeffs: vec![(2, 1.0)],
                },
                BracketEntry {
                    i: 1,
                    j: 2,
                    coeffs: vec![(3, 1.0)],
                },
            ],
            vec!["a1".into(), "a2".into(), "a3".into(), "a4".into()],
        )
        .expect("h4 constants are valid")
    }

    /// Looks up a builtin by tag: `gl<n>`, `affine`, `sl2`, `so3`, `su2`,
    /// `h3`, `h4`.
    pub fn builtin(tag: &str) -> Result<Self> {
        match tag {
            "affine" | "a1" => Ok(Self::affine()),
            "sl2" => Ok(Self::sl2()),
            "so3" | "su2" => Ok(Self::so3()),
            "h3" | "heisenberg" => Ok(Self::heisenberg()),
            "h4" => Ok(Self::heisenberg_extended()),
            t if t.starts_with("gl") => {
                let n: usize = t[2..]
                    .parse()
                    .map_err(|_| Error::Format(format!("unknown algebra tag '{tag}'")))?;
                if n == 0 {
                    return Err(Error::Format("gl(0) is empty".into()));
                }
                Ok(Self::gl(n))
            }
            _ => Err(Error::Format(format!("unknown algebra tag '{tag}'"))),
        }
    }
}

/// Standard basis vector of length `r`.
pub fn unit(r: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; r];
    e[i] = 1.0;
    e
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sl2_bracket_m0_m1() {
        let alg = LieAlgebra::sl2();
        let z = alg.bracket(&unit(3, 0), &unit(3, 1)).unwrap();
        assert_eq!(z, vec![-1.0, 0.0, 0.0]);
    }

    #[test]
    fn heisenberg_bracket() {
        let alg = LieAlgebra::heisenberg();
        let z = alg.bracket(&unit(3, 0), &unit(3, 1)).unwrap();
        assert_eq!(z, vec![0.0, 0.0, -1.0]);
    }

    #[test]
    fn self_bracket_vanishes() {
        let alg = LieAlgebra::gl(2);
        let x = [0.3, -1.2, 2.0, 0.7];
        let z = alg.bracket(&x, &x).unwrap();
        assert!(z.iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn bracket_length_mismatch() {
        let alg = LieAlgebra::sl2();
        assert!(matches!(
            alg.bracket(&[1.0, 0.0], &[0.0, 1.0, 0.0]),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn ad_affine_single_entry() {
        let ad = LieAlgebra::affine().ad_matrix(0).unwrap();
        // e1 -> −e0, e0 -> 0
        assert_eq!(ad[(0, 1)], -1.0);
        assert_eq!(ad[(0, 0)], 0.0);
        assert_eq!(ad[(1, 0)], 0.0);
        assert_eq!(ad[(1, 1)], 0.0);
    }

    #[test]
    fn ad_sl2_m1_on_m0() {
        let ad = LieAlgebra::sl2().ad_matrix(1).unwrap();
        let v = ad * nalgebra::DVector::from_vec(unit(3, 0));
        assert_eq!(v.as_slice(), &[1.0, 0.0, 0.0]);
    }

    #[test]
    fn ad_abelian_is_zero() {
        let alg = LieAlgebra::new(2, vec![0.0; 8], vec![]).unwrap();
        assert!(alg.ad_matrix(1).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn ad_index_out_of_range() {
        assert!(matches!(
            LieAlgebra::sl2().ad_matrix(3),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn ad_matches_bracket() {
        let alg = LieAlgebra::heisenberg_extended();
        let x = [0.2, -0.5, 1.5, 0.9];
        for b in 0..4 {
            let lhs = alg.bracket(&unit(4, b), &x).unwrap();
            let rhs = alg.ad_matrix(b).unwrap() * nalgebra::DVector::from_row_slice(&x);
            for g in 0..4 {
                assert!((lhs[g] - rhs[g]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn rejects_jacobi_violation() {
        // [a0,a1]=a2, [a1,a2]=a0, [a0,a2]=a0 is not a Lie algebra
        let br = vec![
            BracketEntry {
                i: 0,
                j: 1,
                coeffs: vec![(2, 1.0)],
            },
            BracketEntry {
                i: 1,
                j: 2,
                coeffs: vec![(0, 1.0)],
            },
            BracketEntry {
                i: 0,
                j: 2,
                coeffs: vec![(0, 1.0)],
            },
        ];
        assert!(matches!(
            LieAlgebra::from_brackets(3, &br, vec![]),
            Err(Error::InvalidAlgebra(_))
        ));
    }

    #[test]
    fn rejects_non_antisymmetric_tensor() {
        let mut f = vec![0.0; 8];
        f[1] = 1.0; // f[0][0][1]
        assert!(LieAlgebra::new(2, f, vec![]).is_err());
    }

    #[test]
    fn rejects_duplicate_bracket() {
        let br = vec![
            BracketEntry {
                i: 0,
                j: 1,
                coeffs: vec![(0, 1.0)],
            },
            BracketEntry {
                i: 1,
                j: 0,
                coeffs: vec![(0, -1.0)],
            },
        ];
        assert!(LieAlgebra::from_brackets(2, &br, vec![]).is_err());
    }

    #[test]
    fn gl_matches_elementary_bracket_identity() {
        for n in 1..=3 {
            let alg = LieAlgebra::gl(n);
            let idx = |i: usize, j: usize| i * n + j;
            let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        for l in 0..n {
                            let mut want = vec![0.0; n * n];
                            want[idx(i, l)] += d(j, k);
                            want[idx(k, j)] -= d(i, l);
                            let got = alg
                                .bracket(&unit(n * n, idx(i, j)), &unit(n * n, idx(k, l)))
                                .unwrap();
                            assert_eq!(got, want);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn subalgebra_detection() {
        let sl2 = LieAlgebra::sl2();
        assert!(sl2.is_subalgebra(&[0, 1]));
        assert!(sl2.is_subalgebra(&[1, 2]));
        assert!(sl2.is_subalgebra(&[1]));
        assert!(!sl2.is_subalgebra(&[0, 2]));
    }

    #[test]
    fn builtin_tags() {
        assert_eq!(LieAlgebra::builtin("gl3").unwrap().dim(), 9);
        assert_eq!(LieAlgebra::builtin("su2").unwrap(), LieAlgebra::so3());
        assert!(LieAlgebra::builtin("e8").is_err());
    }
}
