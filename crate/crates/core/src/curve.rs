//! Time-dependent coefficient curves `t ↦ (b_0(t), …, b_{r−1}(t))`.

use crate::error::{Error, Result};

/// A scalar function of time from the builtin families.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarDrive {
    Const(f64),
    /// `amp · cos(omega t)`
    Cos {
        amp: f64,
        omega: f64,
    },
    /// `amp · sin(omega t)`
    Sin {
        amp: f64,
        omega: f64,
    },
    /// `c0 + c1 t + c2 t² + …`
    Poly(Vec<f64>),
    Sum(Vec<ScalarDrive>),
}

impl ScalarDrive {
    /// `c0 + c1 cos(ω t)`.
    pub fn cosine(c0: f64, c1: f64, omega: f64) -> Self {
        ScalarDrive::Sum(vec![
            ScalarDrive::Const(c0),
            ScalarDrive::Cos { amp: c1, omega },
        ])
    }

    /// `c · self`.
    pub fn scaled(&self, c: f64) -> Self {
        match self {
            ScalarDrive::Const(x) => ScalarDrive::Const(c * x),
            ScalarDrive::Cos { amp, omega } => ScalarDrive::Cos {
                amp: c * amp,
                omega: *omega,
            },
            ScalarDrive::Sin { amp, omega } => ScalarDrive::Sin {
                amp: c * amp,
                omega: *omega,
            },
            ScalarDrive::Poly(p) => ScalarDrive::Poly(p.iter().map(|x| c * x).collect()),
            ScalarDrive::Sum(parts) => {
                ScalarDrive::Sum(parts.iter().map(|d| d.scaled(c)).collect())
            }
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            ScalarDrive::Const(c) => *c,
            ScalarDrive::Cos { amp, omega } => amp * (omega * t).cos(),
            ScalarDrive::Sin { amp, omega } => amp * (omega * t).sin(),
            ScalarDrive::Poly(c) => c.iter().rev().fold(0.0, |acc, &ci| acc * t + ci),
            ScalarDrive::Sum(parts) => parts.iter().map(|p| p.eval(t)).sum(),
        }
    }

    /// Parses one token: a number, `const:c`, `cos[:a[:w]]`, `sin[:a[:w]]`,
    /// `poly:c0:c1:…`, or several of these joined by `+`.
    pub fn parse(token: &str) -> Result<Self> {
        let token = token.trim();
        if token.is_empty() {
            return Err(Error::Format("empty coefficient token".into()));
        }
        if token.contains('+') && !token.starts_with('+') {
            let parts: Vec<&str> = split_sum(token);
            if parts.len() > 1 {
                let terms = parts
                    .into_iter()
                    .map(Self::parse)
                    .collect::<Result<Vec<_>>>()?;
                return Ok(ScalarDrive::Sum(terms));
            }
        }
        if let Ok(c) = token.parse::<f64>() {
            return Ok(ScalarDrive::Const(c));
        }
        let mut fields = token.split(':');
        let head = fields.next().unwrap_or_default();
        let nums = fields
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Format(format!("bad number '{s}' in token '{token}'")))
            })
            .collect::<Result<Vec<f64>>>()?;
        let amp_omega = |nums: &[f64]| -> Result<(f64, f64)> {
            match nums {
                [] => Ok((1.0, 1.0)),
                [a] => Ok((*a, 1.0)),
                [a, w] => Ok((*a, *w)),
                _ => Err(Error::Format(format!("too many fields in '{token}'"))),
            }
        };
        match head {
            "const" => match nums.as_slice() {
                [c] => Ok(ScalarDrive::Const(*c)),
                _ => Err(Error::Format(format!("'const' takes one value: '{token}'"))),
            },
            "cos" => {
                let (amp, omega) = amp_omega(&nums)?;
                Ok(ScalarDrive::Cos { amp, omega })
            }
            "sin" => {
                let (amp, omega) = amp_omega(&nums)?;
                Ok(ScalarDrive::Sin { amp, omega })
            }
            "poly" if !nums.is_empty() => Ok(ScalarDrive::Poly(nums)),
            _ => Err(Error::Format(format!(
                "unknown coefficient token '{token}'"
            ))),
        }
    }
}

// split on '+' that is not part of an exponent like 1e+3
fn split_sum(s: &str) -> Vec<&str> {
    let bytes = s.as_bytes();
    let mut parts = Vec::new();
    let mut start = 0;
    for i in 0..bytes.len() {
        if bytes[i] == b'+' && i > 0 && !matches!(bytes[i - 1], b'e' | b'E') {
            parts.push(&s[start..i]);
            start = i + 1;
        }
    }
    parts.push(&s[start..]);
    parts
}

#[derive(Debug, Clone, PartialEq)]
pub enum CoefficientCurve {
    Constant(Vec<f64>),
    /// Samples on a strictly increasing grid, linearly interpolated; no
    /// extrapolation outside `[ts[0], ts[last]]`.
    Sampled {
        ts: Vec<f64>,
        values: Vec<Vec<f64>>,
    },
    Builtin(Vec<ScalarDrive>),
}

impl CoefficientCurve {
    pub fn constant(b: Vec<f64>) -> Self {
        CoefficientCurve::Constant(b)
    }

    pub fn sampled(ts: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        if ts.is_empty() || ts.len() != values.len() {
            return Err(Error::Grid {
                module: "group-flow",
                reason: format!("{} times for {} samples", ts.len(), values.len()),
            });
        }
        if ts.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Grid {
                module: "group-flow",
                reason: "sample times must be strictly increasing".into(),
            });
        }
        let r = values[0].len();
        if values.iter().any(|v| v.len() != r) {
            return Err(Error::dim("group-flow", r, 0));
        }
        Ok(CoefficientCurve::Sampled { ts, values })
    }

    /// Comma-separated builtin grammar, one token per component.
    pub fn parse(spec: &str) -> Result<Self> {
        let drives = spec
            .split(',')
            .map(ScalarDrive::parse)
            .collect::<Result<Vec<_>>>()?;
        Ok(CoefficientCurve::Builtin(drives))
    }

    pub fn dim(&self) -> usize {
        match self {
            CoefficientCurve::Constant(b) => b.len(),
            CoefficientCurve::Sampled { values, .. } => values[0].len(),
            CoefficientCurve::Builtin(d) => d.len(),
        }
    }

    /// Interval on which the curve is defined (`None` means all of R).
    pub fn domain(&self) -> Option<(f64, f64)> {
        match self {
            CoefficientCurve::Sampled { ts, .. } => Some((ts[0], ts[ts.len() - 1])),
            _ => None,
        }
    }

    pub fn eval(&self, t: f64) -> Result<Vec<f64>> {
        match self {
            CoefficientCurve::Constant(b) => Ok(b.clone()),
            CoefficientCurve::Builtin(d) => Ok(d.iter().map(|s| s.eval(t)).collect()),
            CoefficientCurve::Sampled { ts, values } => {
                let (t0, t1) = (ts[0], ts[ts.len() - 1]);
                let slack = 1e-12 * t0.abs().max(t1.abs()).max(1.0);
                if !(t >= t0 - slack && t <= t1 + slack) {
                    return Err(Error::CurveUndefined { t });
                }
                if ts.len() == 1 {
                    return Ok(values[0].clone());
                }
                let t = t.clamp(t0, t1);
                let k = match ts.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
                    Ok(k) => return Ok(values[k].clone()),
                    Err(k) => k.clamp(1, ts.len() - 1),
                };
                let w = (t - ts[k - 1]) / (ts[k] - ts[k - 1]);
                Ok(values[k - 1]
                    .iter()
                    .zip(&values[k])
                    .map(|(a, b)| a + w * (b - a))
                    .collect())
            }
        }
    }

    /// Errors unless the curve is defined on `[t0, t1]`.
    pub fn check_window(&self, t0: f64, t1: f64) -> Result<()> {
        if let Some((a, b)) = self.domain() {
            let slack = 1e-12 * a.abs().max(b.abs()).max(1.0);
            if t0 < a - slack {
                return Err(Error::CurveUndefined { t: t0 });
            }
            if t1 > b + slack {
                return Err(Error::CurveUndefined { t: t1 });
            }
        }
        Ok(())
    }

    /// Lifts a curve on a subalgebra spanned by `indices` into the full
    /// `r`-dimensional basis (zeros elsewhere).
    pub fn embed(&self, indices: &[usize], r: usize) -> Result<Self> {
        if indices.len() != self.dim() {
            return Err(Error::dim("group-flow", self.dim(), indices.len()));
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= r) {
            return Err(Error::IndexOutOfRange {
                module: "group-flow",
                index: bad,
                dim: r,
            });
        }
        let spread = |v: &[f64]| {
            let mut full = vec![0.0; r];
            for (&i, &x) in indices.iter().zip(v) {
                full[i] = x;
            }
            full
        };
        Ok(match self {
            CoefficientCurve::Constant(b) => CoefficientCurve::Constant(spread(b)),
            CoefficientCurve::Sampled { ts, values } => CoefficientCurve::Sampled {
                ts: ts.clone(),
                values: values.iter().map(|v| spread(v)).collect(),
            },
            CoefficientCurve::Builtin(d) => {
                let mut full = vec![ScalarDrive::Const(0.0); r];
                for (&i, s) in indices.iter().zip(d) {
                    full[i] = s.clone();
                }
                CoefficientCurve::Builtin(full)
            }
        })
    }
}
