use serde::Serialize;
use serde_json::{Map, Value};
use std::fmt;
use std::path::Path;

#[derive(Debug)]
pub enum CliError {
    /// Malformed input: bad flags, files, or values.
    Spec(String),
    Core(lieflow_core::Error),
}

impl CliError {
    pub fn spec(msg: impl Into<String>) -> Self {
        CliError::Spec(msg.into())
    }

    /// 2 for numerical breakdown, 1 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_numerical() => 2,
            _ => 1,
        }
    }

    pub fn report(&self, command: &str) -> Report {
        let mut r = Report::new(command);
        r.worst = f64::NAN;
        r.set("status", "error");
        r.set("exit_code", self.exit_code());
        r.set("error", self.to_string());
        if let CliError::Core(e) = self {
            if let Some(t) = e.time() {
                r.set(
                    "breakdown",
                    serde_json::json!({ "t": t, "numerical": e.is_numerical() }),
                );
            }
        }
        r
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Spec(m) => write!(f, "cli: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<lieflow_core::Error> for CliError {
    fn from(e: lieflow_core::Error) -> Self {
        CliError::Core(e)
    }
}

/// JSON run report. Keys are kept sorted so repeated runs print the same
/// bytes.
#[derive(Debug, Clone)]
pub struct Report {
    fields: Map<String, Value>,
    invariants: Map<String, Value>,
    worst: f64,
}

impl Report {
    pub fn new(command: &str) -> Self {
        let mut fields = Map::new();
        fields.insert("command".into(), command.into());
        fields.insert("status".into(), "ok".into());
        Report {
            fields,
            invariants: Map::new(),
            worst: 0.0,
        }
    }

    pub fn set(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.fields.insert(key.into(), v);
    }

    /// Records an invariant violation; the largest one is reported as
    /// `max_invariant_violation`.
    pub fn invariant(&mut self, key: &str, value: f64) {
        self.worst = if value.is_nan() {
            f64::NAN
        } else {
            self.worst.max(value)
        };
        self.invariants.insert(key.into(), finite_or_null(value));
    }

    pub fn to_json(&self) -> String {
        let mut all = self.fields.clone();
        all.insert("invariants".into(), Value::Object(self.invariants.clone()));
        all.insert("max_invariant_violation".into(), finite_or_null(self.worst));
        let mut s = serde_json::to_string_pretty(&Value::Object(all)).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        std::fs::write(path, self.to_json())
            .map_err(|e| CliError::spec(format!("cannot write report {}: {e}", path.display())))
    }
}

fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        x.into()
    } else {
        Value::Null
    }
}
