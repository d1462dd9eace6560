//! Second-kind canonical coordinates `g = Π_α exp(−v_α a_α)` and the
//! Wei–Norman system `M(v) v̇ = b`.

use crate::algebra::LieAlgebra;
use crate::curve::CoefficientCurve;
use crate::error::{Error, Result};
use crate::expm::expm;
use crate::flow::GroupTrajectory;
use crate::io;
use crate::ode::{cumulative_simpson, uniform_grid};
use crate::rep::MatrixRep;
use crate::scalar::Scalar;
use nalgebra::{DMatrix, DVector};

const MODULE: &str = "wei-norman";

/// `|det M(v)|` below this is reported as a coordinate breakdown.
pub const BREAKDOWN_DET: f64 = 1e-10;

/// Coordinate curves in a fixed factorization order. `vs[k][α]` is the
/// coordinate of basis element `α` (not of the `α`-th factor) at `ts[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalCoords {
    pub order: Vec<usize>,
    pub ts: Vec<f64>,
    pub vs: Vec<Vec<f64>>,
}

impl CanonicalCoords {
    pub fn dim(&self) -> usize {
        self.order.len()
    }

    pub fn last(&self) -> &[f64] {
        &self.vs[self.vs.len() - 1]
    }

    /// Time series of the coordinate of basis element `alpha`.
    pub fn curve(&self, alpha: usize) -> Vec<f64> {
        self.vs.iter().map(|v| v[alpha]).collect()
    }

    /// CSV with header `t,v0,…` and a `# order=…` comment line.
    pub fn to_csv(&self) -> String {
        let r = self.dim();
        let mut header = vec!["t".to_string()];
        header.extend((0..r).map(|i| format!("v{i}")));
        let order: Vec<String> = self.order.iter().map(|i| i.to_string()).collect();
        let rows = self.ts.iter().zip(&self.vs).map(|(t, v)| {
            let mut row = vec![*t];
            row.extend_from_slice(v);
            row
        });
        io::write_csv(&header, rows, &[format!("order={}", order.join(","))])
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let table = io::read_csv(text)?;
        let r = table.header.len() - 1;
        let order = match table.comment_value("order") {
            Some(s) => parse_order(s, r)?,
            None => (0..r).collect(),
        };
        Ok(CanonicalCoords {
            order,
            ts: table.rows.iter().map(|row| row[0]).collect(),
            vs: table.rows.iter().map(|row| row[1..].to_vec()).collect(),
        })
    }
}

/// Parses `"2,0,1"` and checks it is a permutation of `0..r`.
pub fn parse_order(s: &str, r: usize) -> Result<Vec<usize>> {
    let order = s
        .split(',')
        .map(|x| {
            x.trim()
                .parse::<usize>()
                .map_err(|_| Error::Format(format!("bad order entry '{x}'")))
        })
        .collect::<Result<Vec<_>>>()?;
    check_order(&order, r)?;
    Ok(order)
}

pub fn check_order(order: &[usize], r: usize) -> Result<()> {
    if order.len() != r {
        return Err(Error::dim(MODULE, r, order.len()));
    }
    let mut seen = vec![false; r];
    for &i in order {
        if i >= r {
            return Err(Error::IndexOutOfRange {
                module: MODULE,
                index: i,
                dim: r,
            });
        }
        if seen[i] {
            return Err(Error::Format(format!("order {order:?} repeats index {i}")));
        }
        seen[i] = true;
    }
    Ok(())
}

/// Builds `M(v)` with precomputed ad matrices.
#[derive(Debug, Clone)]
struct StepMatrix {
    order: Vec<usize>,
    ads: Vec<DMatrix<f64>>,
}

impl StepMatrix {
    fn new(alg: &LieAlgebra, order: &[usize]) -> Result<Self> {
        check_order(order, alg.dim())?;
        let ads = (0..alg.dim())
            .map(|b| alg.ad_matrix(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(StepMatrix {
            order: order.to_vec(),
            ads,
        })
    }

    fn eval(&self, v: &[f64]) -> Result<DMatrix<f64>> {
        let r = self.order.len();
        if v.len() != r {
            return Err(Error::dim(MODULE, r, v.len()));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite {
                module: MODULE,
                t: None,
            });
        }
        let mut m = DMatrix::zeros(r, r);
        let mut running = DMatrix::<f64>::identity(r, r);
        for (pos, &a) in self.order.iter().enumerate() {
            m.set_column(a, &running.column(a));
            if pos + 1 < r && v[a] != 0.0 {
                running *= expm(&(&self.ads[a] * -v[a]))?;
            }
        }
        Ok(m)
    }

    // v̇ = M(v)⁻¹ b, with the determinant for breakdown detection
    fn rate(&self, t: f64, v: &[f64], b: &[f64]) -> Result<(Vec<f64>, f64)> {
        let m = self.eval(v)?;
        let lu = m.lu();
        let det = lu.determinant();
        if !(det.abs() >= BREAKDOWN_DET) {
            return Err(Error::Breakdown {
                t,
                det: det.abs(),
                v: v.to_vec(),
            });
        }
        let x = lu
            .solve(&DVector::from_column_slice(b))
            .ok_or_else(|| Error::Breakdown {
                t,
                det: det.abs(),
                v: v.to_vec(),
            })?;
        Ok((x.as_slice().to_vec(), det))
    }
}

/// `M(v)`: column `α` is `(Π_{β before α} exp(−v_β ad a_β)) e_α`, products
/// taken in factorization order.
pub fn wn_step_matrix(alg: &LieAlgebra, order: &[usize], v: &[f64]) -> Result<DMatrix<f64>> {
    StepMatrix::new(alg, order)?.eval(v)
}

/// RK4 on `M(v) v̇ = b`, `v(0) = 0`, with one LU solve per stage.
pub fn solve_wei_norman(
    alg: &LieAlgebra,
    order: &[usize],
    b: &CoefficientCurve,
    t_end: f64,
    dt: f64,
) -> Result<CanonicalCoords> {
    let sm = StepMatrix::new(alg, order)?;
    let r = alg.dim();
    if b.dim() != r {
        return Err(Error::dim(MODULE, r, b.dim()));
    }
    let ts = uniform_grid(0.0, t_end, dt, MODULE)?;
    b.check_window(0.0, t_end)?;

    let mut v = vec![0.0; r];
    let mut vs = Vec::with_capacity(ts.len());
    vs.push(v.clone());
    let mut prev_det: f64 = 1.0;
    let shifted = |v: &[f64], k: &[f64], h: f64| -> Vec<f64> {
        v.iter().zip(k).map(|(a, b)| a + h * b).collect()
    };
    for w in ts.windows(2) {
        let (t, h) = (w[0], w[1] - w[0]);
        let (k1, det) = sm.rate(t, &v, &b.eval(t)?)?;
        if det.signum() != prev_det.signum() {
            return Err(Error::Breakdown {
                t,
                det: det.abs(),
                v,
            });
        }
        prev_det = det;
        let bm = b.eval(t + 0.5 * h)?;
        let (k2, _) = sm.rate(t + 0.5 * h, &shifted(&v, &k1, 0.5 * h), &bm)?;
        let (k3, _) = sm.rate(t + 0.5 * h, &shifted(&v, &k2, 0.5 * h), &bm)?;
        let (k4, _) = sm.rate(t + h, &shifted(&v, &k3, h), &b.eval(t + h)?)?;
        for i in 0..r {
            v[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite {
                module: MODULE,
                t: Some(w[1]),
            });
        }
        vs.push(v.clone());
    }
    let t_last = ts[ts.len() - 1];
    let (_, det) = sm.rate(t_last, &v, &b.eval(t_last)?)?;
    if det.signum() != prev_det.signum() {
        return Err(Error::Breakdown {
            t: t_last,
            det: det.abs(),
            v,
        });
    }
    Ok(CanonicalCoords {
        order: order.to_vec(),
        ts,
        vs,
    })
}

/// `g = Π exp(−v_α M_α)` in factorization order at one set of coordinates.
pub fn product_of_exponentials<T: Scalar>(
    rep: &MatrixRep<T>,
    order: &[usize],
    v: &[f64],
) -> Result<DMatrix<T>> {
    check_order(order, rep.dim())?;
    if v.len() != rep.dim() {
        return Err(Error::dim(MODULE, rep.dim(), v.len()));
    }
    let n = rep.size();
    let mut g = DMatrix::<T>::identity(n, n);
    for &a in order {
        if v[a] != 0.0 {
            g *= expm(&(&rep.mats()[a] * T::of_f64(-v[a])))?;
        }
    }
    Ok(g)
}

pub fn reconstruct<T: Scalar>(
    rep: &MatrixRep<T>,
    coords: &CanonicalCoords,
) -> Result<GroupTrajectory<T>> {
    let gs = coords
        .vs
        .iter()
        .map(|v| product_of_exponentials(rep, &coords.order, v))
        .collect::<Result<Vec<_>>>()?;
    GroupTrajectory::new(coords.ts.clone(), gs)
}

/// How each coordinate's rate depends on the others: `v̇_α = p + q v_α`
/// with `p, q` functions of `t` and the coordinates listed in `deps[α]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraturePlan {
    /// Coordinates in the order they can be integrated.
    pub sequence: Vec<usize>,
    pub deps: Vec<Vec<usize>>,
    /// Whether `v̇_α` depends (affinely) on `v_α` itself.
    pub self_linear: Vec<bool>,
}

// Deterministic probe points; entries are O(1) so that exp factors stay tame.
fn probe_points(r: usize) -> Vec<Vec<f64>> {
    let mut state: u64 = 0x9E37_79B9_7F4A_7C15;
    let mut next = || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64 * 1.6 - 0.8
    };
    (0..4).map(|_| (0..r).map(|_| next()).collect()).collect()
}

/// Inspects `N(v) = M(v)⁻¹` numerically to find a triangular integration
/// sequence. Fails when coordinates depend on each other cyclically or on
/// themselves non-affinely.
pub fn quadrature_plan(alg: &LieAlgebra, order: &[usize]) -> Result<QuadraturePlan> {
    let sm = StepMatrix::new(alg, order)?;
    let r = alg.dim();
    let inverse = |v: &[f64]| -> Result<DMatrix<f64>> {
        sm.eval(v)?
            .try_inverse()
            .ok_or(Error::NotQuadratureReducible(
                "step matrix singular at a probe point".into(),
            ))
    };
    let tol = 1e-9;
    let mut deps = vec![Vec::new(); r];
    let mut self_linear = vec![false; r];
    for v in probe_points(r) {
        let n0 = inverse(&v)?;
        for beta in 0..r {
            let mut vp = v.clone();
            vp[beta] += 0.37;
            let n1 = inverse(&vp)?;
            vp[beta] += 0.37;
            let n2 = inverse(&vp)?;
            for alpha in 0..r {
                let d1 = (n1.row(alpha) - n0.row(alpha)).norm();
                if d1 <= tol {
                    continue;
                }
                if alpha == beta {
                    let curvature = (n2.row(alpha) - n1.row(alpha) * 2.0 + n0.row(alpha)).norm();
                    if curvature > tol {
                        return Err(Error::NotQuadratureReducible(format!(
                            "rate of v{alpha} is nonlinear in v{alpha}"
                        )));
                    }
                    self_linear[alpha] = true;
                } else if !deps[alpha].contains(&beta) {
                    deps[alpha].push(beta);
                }
            }
        }
    }
    for d in &mut deps {
        d.sort_unstable();
    }
    // Kahn's algorithm on the dependency graph
    let mut done = vec![false; r];
    let mut sequence = Vec::with_capacity(r);
    while sequence.len() < r {
        let ready = (0..r).find(|&a| !done[a] && deps[a].iter().all(|&b| done[b]));
        match ready {
            Some(a) => {
                done[a] = true;
                sequence.push(a);
            }
            None => {
                let stuck: Vec<usize> = (0..r).filter(|&a| !done[a]).collect();
                return Err(Error::NotQuadratureReducible(format!(
                    "coordinates {stuck:?} depend on each other cyclically"
                )));
            }
        }
    }
    Ok(QuadraturePlan {
        sequence,
        deps,
        self_linear,
    })
}

/// Nested quadratures following [`quadrature_plan`]. Integrals use
/// composite Simpson with panel width `dt` on a grid of spacing `dt/2`;
/// self-dependent coordinates use the integrating factor
/// `v = e^{Q} ∫ p e^{−Q}`, `Q = ∫ q`.
pub fn quadrature_solve(
    alg: &LieAlgebra,
    order: &[usize],
    b: &CoefficientCurve,
    t_end: f64,
    dt: f64,
) -> Result<CanonicalCoords> {
    let plan = quadrature_plan(alg, order)?;
    let sm = StepMatrix::new(alg, order)?;
    let r = alg.dim();
    if b.dim() != r {
        return Err(Error::dim(MODULE, r, b.dim()));
    }
    let ts = uniform_grid(0.0, t_end, dt, MODULE)?;
    b.check_window(0.0, t_end)?;
    let steps = ts.len() - 1;
    let h = t_end / (2 * steps) as f64;
    let fine: Vec<f64> = (0..=2 * steps)
        .map(|k| if k == 2 * steps { t_end } else { k as f64 * h })
        .collect();
    let bs = fine
        .iter()
        .map(|&t| b.eval(t))
        .collect::<Result<Vec<_>>>()?;
    let mut vs = vec![vec![0.0; r]; fine.len()];

    for &a in &plan.sequence {
        let mut p = Vec::with_capacity(fine.len());
        let mut q = Vec::with_capacity(fine.len());
        for (k, &t) in fine.iter().enumerate() {
            let mut v = vs[k].clone();
            v[a] = 0.0;
            let (rate0, _) = sm.rate(t, &v, &bs[k])?;
            p.push(rate0[a]);
            if plan.self_linear[a] {
                v[a] = 1.0;
                let (rate1, _) = sm.rate(t, &v, &bs[k])?;
                q.push(rate1[a] - rate0[a]);
            }
        }
        let col = if plan.self_linear[a] {
            let big_q = cumulative_simpson(&q, h);
            let weighted: Vec<f64> = p.iter().zip(&big_q).map(|(p, q)| p * (-q).exp()).collect();
            let inner = cumulative_simpson(&weighted, h);
            big_q.iter().zip(&inner).map(|(q, i)| q.exp() * i).collect()
        } else {
            cumulative_simpson(&p, h)
        };
        if let Some(k) = col.iter().position(|x: &f64| !x.is_finite()) {
            return Err(Error::NonFinite {
                module: MODULE,
                t: Some(fine[k]),
            });
        }
        for (v, x) in vs.iter_mut().zip(col) {
            v[a] = x;
        }
    }
    Ok(CanonicalCoords {
        order: order.to_vec(),
        ts,
        vs: vs.into_iter().step_by(2).collect(),
    })
}
