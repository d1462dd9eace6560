use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the solvers. Every message starts with the module that
/// produced it; numerical failures carry the time at which they happened.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{module}: dimension mismatch: expected {expected}, got {got}")]
    Dimension {
        module: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("{module}: index {index} out of range for dimension {dim}")]
    IndexOutOfRange {
        module: &'static str,
        index: usize,
        dim: usize,
    },

    #[error("lie-core: invalid algebra: {0}")]
    InvalidAlgebra(String),

    #[error("lie-core: representation error: {0}")]
    Representation(String),

    #[error("{module}: matrix is singular{}", fmt_time(*.t))]
    Singular {
        module: &'static str,
        t: Option<f64>,
    },

    #[error("{module}: non-finite value encountered{}", fmt_time(*.t))]
    NonFinite {
        module: &'static str,
        t: Option<f64>,
    },

    #[error("group-flow: coefficient curve undefined at t={t}")]
    CurveUndefined { t: f64 },

    #[error("{module}: invalid window or step: {reason}")]
    InvalidWindow {
        module: &'static str,
        reason: String,
    },

    #[error("wei-norman: coordinate breakdown at t={t} (|det M|={det:.3e}, v={v:?})")]
    Breakdown { t: f64, det: f64, v: Vec<f64> },

    #[error("wei-norman: system is not reducible to quadratures: {0}")]
    NotQuadratureReducible(String),

    #[error("{module}: degenerate input: {reason}")]
    Degenerate {
        module: &'static str,
        reason: String,
    },

    #[error("superposition: denominator vanishes (|D|={0:.3e})")]
    Pole(f64),

    #[error("{module}: no convergence after {iterations} iterations (residual {residual:.3e})")]
    NonConvergence {
        module: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("homogeneous: element is not in the group of this action: {0}")]
    WrongGroup(String),

    #[error("{module}: point leaves the chart{}", fmt_time(*.t))]
    ChartExit {
        module: &'static str,
        t: Option<f64>,
    },

    #[error("reduction: out-of-subalgebra leakage {leakage:.3e} at t={t} exceeds {tolerance:.1e}")]
    Leakage {
        leakage: f64,
        t: f64,
        tolerance: f64,
    },

    #[error("reduction: {0}")]
    NotSubalgebra(String),

    #[error("{module}: grid mismatch: {reason}")]
    Grid {
        module: &'static str,
        reason: String,
    },

    #[error("physics: momentum grid too small: shift {shift:.3e} exceeds {limit:.3e}")]
    GridTooSmall { shift: f64, limit: f64 },

    #[error("io: {0}")]
    Format(String),
}

fn fmt_time(t: Option<f64>) -> String {
    match t {
        Some(t) => format!(" at t={t}"),
        None => String::new(),
    }
}

impl Error {
    /// True for failures of the numerics (breakdown, divergence, poles) as
    /// opposed to malformed input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Singular { .. }
                | Error::NonFinite { .. }
                | Error::Breakdown { .. }
                | Error::Pole(_)
                | Error::NonConvergence { .. }
                | Error::ChartExit { .. }
                | Error::Leakage { .. }
                | Error::GridTooSmall { .. }
        )
    }

    /// Time of failure, when the error carries one.
    pub fn time(&self) -> Option<f64> {
        match self {
            Error::Singular { t, .. } | Error::NonFinite { t, .. } | Error::ChartExit { t, .. } => {
                *t
            }
            Error::CurveUndefined { t } | Error::Breakdown { t, .. } | Error::Leakage { t, .. } => {
                Some(*t)
            }
            _ => None,
        }
    }

    pub(crate) fn dim(module: &'static str, expected: usize, got: usize) -> Self {
        Error::Dimension {
            module,
            expected,
            got,
        }
    }
}
