//! Group actions on homogeneous spaces and the Lie systems they carry.
//!
//! Three actions are provided: SL(2, ℝ) by homographies on the compactified
//! line, the affine group on the line, and the 3×3 Heisenberg group on the
//! phase plane. With the fundamental fields `X_a(x) = d/dt Φ(exp(−t a), x)`
//! at `t = 0` the associated Lie system is `ẋ = Σ b_α X_α(x)`.

use crate::error::{Error, Result};
use crate::expm::expm;
use crate::flow::GroupTrajectory;
use crate::io;
use crate::rep::RealRep;
use crate::superposition::ProjectivePoint;
use nalgebra::DMatrix;

const MODULE: &str = "homogeneous";
const GROUP_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActionKind {
    /// `x ↦ (αx + β)/(γx + δ)` on ℝ ∪ {∞}.
    Sl2Homography,
    /// `x ↦ α₁x + α₀`.
    AffineLine,
    /// `(x, p, 1)ᵀ ↦ g (x, p, 1)ᵀ`.
    HeisenbergPlane,
}

impl ActionKind {
    pub fn tag(&self) -> &'static str {
        match self {
            ActionKind::Sl2Homography => "sl2-homography",
            ActionKind::AffineLine => "affine-line",
            ActionKind::HeisenbergPlane => "heisenberg-plane",
        }
    }

    /// Dimension of the affine chart.
    pub fn chart_dim(&self) -> usize {
        match self {
            ActionKind::HeisenbergPlane => 2,
            _ => 1,
        }
    }
}

/// A point of one of the three homogeneous spaces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Point {
    Projective(ProjectivePoint),
    Line(f64),
    Plane([f64; 2]),
}

impl Point {
    /// Coordinates in the affine chart; ∞ has none.
    pub fn chart(&self) -> Result<Vec<f64>> {
        match self {
            Point::Projective(p) if p.is_infinite() => Err(Error::ChartExit {
                module: MODULE,
                t: None,
            }),
            Point::Projective(p) => Ok(vec![p.value()]),
            Point::Line(x) => Ok(vec![*x]),
            Point::Plane(xp) => Ok(xp.to_vec()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct HomogeneousAction {
    kind: ActionKind,
    rep: RealRep,
}

impl HomogeneousAction {
    pub fn sl2_homography() -> Self {
        HomogeneousAction {
            kind: ActionKind::Sl2Homography,
            rep: RealRep::sl2_defining(),
        }
    }

    pub fn affine_line() -> Self {
        HomogeneousAction {
            kind: ActionKind::AffineLine,
            rep: RealRep::affine_2x2(),
        }
    }

    pub fn heisenberg_plane() -> Self {
        HomogeneousAction {
            kind: ActionKind::HeisenbergPlane,
            rep: RealRep::heisenberg_upper(),
        }
    }

    pub fn from_tag(tag: &str) -> Result<Self> {
        match tag {
            "sl2-homography" | "sl2" | "riccati" => Ok(Self::sl2_homography()),
            "affine-line" | "affine" => Ok(Self::affine_line()),
            "heisenberg-plane" | "heisenberg" | "h3" => Ok(Self::heisenberg_plane()),
            _ => Err(Error::Format(format!("unknown action '{tag}'"))),
        }
    }

    pub fn kind(&self) -> ActionKind {
        self.kind
    }

    pub fn rep(&self) -> &RealRep {
        &self.rep
    }

    /// Builds a point from affine-chart coordinates.
    pub fn point(&self, chart: &[f64]) -> Result<Point> {
        if chart.len() != self.kind.chart_dim() {
            return Err(Error::dim(MODULE, self.kind.chart_dim(), chart.len()));
        }
        Ok(match self.kind {
            ActionKind::Sl2Homography => Point::Projective(ProjectivePoint::finite(chart[0])),
            ActionKind::AffineLine => Point::Line(chart[0]),
            ActionKind::HeisenbergPlane => Point::Plane([chart[0], chart[1]]),
        })
    }

    fn check_group(&self, g: &DMatrix<f64>) -> Result<()> {
        let n = self.rep.size();
        if g.nrows() != n || g.ncols() != n {
            return Err(Error::WrongGroup(format!(
                "{} needs {n}x{n} matrices, got {}x{}",
                self.kind.tag(),
                g.nrows(),
                g.ncols()
            )));
        }
        let ok = match self.kind {
            ActionKind::Sl2Homography => (g.determinant() - 1.0).abs() <= GROUP_TOL,
            ActionKind::AffineLine => {
                g[(1, 0)].abs() <= GROUP_TOL
                    && (g[(1, 1)] - 1.0).abs() <= GROUP_TOL
                    && g[(0, 0)] != 0.0
            }
            ActionKind::HeisenbergPlane => (0..3).all(|i| {
                (g[(i, i)] - 1.0).abs() <= GROUP_TOL && (0..i).all(|j| g[(i, j)].abs() <= GROUP_TOL)
            }),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::WrongGroup(format!(
                "matrix is not in the group of {}",
                self.kind.tag()
            )))
        }
    }

    fn point_matches(&self, x: &Point) -> Result<()> {
        let ok = matches!(
            (self.kind, x),
            (ActionKind::Sl2Homography, Point::Projective(_))
                | (ActionKind::AffineLine, Point::Line(_))
                | (ActionKind::HeisenbergPlane, Point::Plane(_))
        );
        if ok {
            Ok(())
        } else {
            Err(Error::WrongGroup(format!(
                "point {x:?} is not in the space of {}",
                self.kind.tag()
            )))
        }
    }

    /// `Φ(g, x)`.
    pub fn act(&self, g: &DMatrix<f64>, x: &Point) -> Result<Point> {
        self.check_group(g)?;
        self.act_unchecked(g, x)
    }

    fn act_unchecked(&self, g: &DMatrix<f64>, x: &Point) -> Result<Point> {
        self.point_matches(x)?;
        Ok(match *x {
            Point::Projective(p) => Point::Projective(ProjectivePoint::new(
                g[(0, 0)] * p.p() + g[(0, 1)] * p.q(),
                g[(1, 0)] * p.p() + g[(1, 1)] * p.q(),
            )?),
            Point::Line(x) => Point::Line(g[(0, 0)] * x + g[(0, 1)]),
            Point::Plane([x, p]) => Point::Plane([
                g[(0, 0)] * x + g[(0, 1)] * p + g[(0, 2)],
                g[(1, 0)] * x + g[(1, 1)] * p + g[(1, 2)],
            ]),
        })
    }

    /// `x(t) = Φ(g(t), x₀)` along a group trajectory.
    pub fn propagate(&self, traj: &GroupTrajectory<f64>, x0: &Point) -> Result<PointCurve> {
        let points = traj
            .ts
            .iter()
            .zip(&traj.gs)
            .map(|(&t, g)| {
                self.act(g, x0).map_err(|e| match e {
                    Error::WrongGroup(msg) => Error::WrongGroup(format!("{msg} at t={t}")),
                    e => e,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PointCurve {
            kind: self.kind,
            ts: traj.ts.clone(),
            points,
        })
    }

    /// `X_α(x)` in chart coordinates by central differences of
    /// `t ↦ Φ(exp(−t M_α), x)`, with one Richardson step.
    pub fn fundamental_vector_field(&self, alpha: usize, x: &Point) -> Result<Vec<f64>> {
        let r = self.rep.dim();
        if alpha >= r {
            return Err(Error::IndexOutOfRange {
                module: MODULE,
                index: alpha,
                dim: r,
            });
        }
        let x_chart = x.chart()?;
        let m = &self.rep.mats()[alpha];
        let eval = |t: f64| -> Result<Vec<f64>> {
            let g = expm(&(m * -t))?;
            self.act_unchecked(&g, x)?.chart()
        };
        let central = |h: f64| -> Result<Vec<f64>> {
            let (a, b) = (eval(h)?, eval(-h)?);
            Ok(a.iter().zip(&b).map(|(a, b)| (a - b) / (2.0 * h)).collect())
        };
        let h = 1e-3 / x_chart.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let (coarse, fine) = (central(h)?, central(0.5 * h)?);
        Ok(fine
            .iter()
            .zip(&coarse)
            .map(|(f, c)| (4.0 * f - c) / 3.0)
            .collect())
    }

    /// Right-hand side `Σ b_α X_α(x)` of the associated Lie system.
    pub fn lie_system_rhs(&self, b: &[f64], x: &Point) -> Result<Vec<f64>> {
        if b.len() != self.rep.dim() {
            return Err(Error::dim(MODULE, self.rep.dim(), b.len()));
        }
        let mut out = vec![0.0; self.kind.chart_dim()];
        for (alpha, &ba) in b.iter().enumerate() {
            if ba != 0.0 {
                for (o, x) in out.iter_mut().zip(self.fundamental_vector_field(alpha, x)?) {
                    *o += ba * x;
                }
            }
        }
        Ok(out)
    }
}

/// Group-equation coefficients for the Riccati equation
/// `ẋ = c0 + c1 x + c2 x²` under the homography action, whose fundamental
/// fields are `X_0 = −1`, `X_1 = −x`, `X_2 = −x²`. Hence `b = −c`.
pub fn riccati_to_b(c: [f64; 3]) -> [f64; 3] {
    [-c[0], -c[1], -c[2]]
}

/// Inverse of [`riccati_to_b`].
pub fn b_to_riccati(b: [f64; 3]) -> [f64; 3] {
    [-b[0], -b[1], -b[2]]
}

/// A curve of points produced by [`HomogeneousAction::propagate`].
#[derive(Debug, Clone, PartialEq)]
pub struct PointCurve {
    pub kind: ActionKind,
    pub ts: Vec<f64>,
    pub points: Vec<Point>,
}

impl PointCurve {
    /// Chart coordinates at every time; fails at the first point at ∞.
    pub fn chart_values(&self) -> Result<Vec<Vec<f64>>> {
        self.ts
            .iter()
            .zip(&self.points)
            .map(|(&t, p)| {
                p.chart().map_err(|_| Error::ChartExit {
                    module: MODULE,
                    t: Some(t),
                })
            })
            .collect()
    }

    /// CSV: `t,x,p,q` for the projective line (`x` is `inf` at ∞), `t,x`
    /// for the affine line and `t,x,p` for the phase plane.
    pub fn to_csv(&self) -> String {
        let (header, rows): (Vec<&str>, Vec<Vec<f64>>) = match self.kind {
            ActionKind::Sl2Homography => (
                vec!["t", "x", "p", "q"],
                self.ts
                    .iter()
                    .zip(&self.points)
                    .map(|(&t, pt)| match pt {
                        Point::Projective(p) => vec![t, p.value(), p.p(), p.q()],
                        _ => unreachable!("curve of mixed point types"),
                    })
                    .collect(),
            ),
            ActionKind::AffineLine | ActionKind::HeisenbergPlane => {
                let header = if self.kind == ActionKind::AffineLine {
                    vec!["t", "x"]
                } else {
                    vec!["t", "x", "p"]
                };
                let rows = self
                    .ts
                    .iter()
                    .zip(&self.points)
                    .map(|(&t, pt)| {
                        let mut row = vec![t];
                        row.extend(pt.chart().expect("finite point"));
                        row
                    })
                    .collect();
                (header, rows)
            }
        };
        let header: Vec<String> = header.into_iter().map(String::from).collect();
        io::write_csv(&header, rows, &[format!("action={}", self.kind.tag())])
    }
}
