//! `run --spec file.json`: the JSON object names a subcommand and its flags.
//!
//! ```json
//! { "command": "solve-group", "algebra": "sl2", "b": "cos,0.3,sin",
//!   "t_end": 2, "dt": 1e-3, "out": "traj.csv", "report": "report.json" }
//! ```
//!
//! Keys map to long flags (`t_end` → `--t-end`), `true` to a bare switch,
//! arrays of strings to repeated values and arrays of numbers to a
//! comma-separated list.

use crate::input::read_text;
use crate::report::CliError;
use crate::{Cli, Command};
use clap::Parser;
use serde_json::Value;
use std::path::Path;

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

pub fn to_args(spec: &Value) -> Result<Vec<String>, CliError> {
    let obj = spec
        .as_object()
        .ok_or_else(|| CliError::spec("spec must be a JSON object"))?;
    let command = obj
        .get("command")
        .and_then(Value::as_str)
        .ok_or_else(|| CliError::spec("spec needs a string 'command'"))?;
    let mut args = vec!["lieflow".to_string()];
    args.extend(command.split_whitespace().map(String::from));
    for (key, value) in obj.iter().filter(|(k, _)| k.as_str() != "command") {
        let flag = format!("--{}", key.replace('_', "-"));
        match value {
            Value::Null | Value::Bool(false) => {}
            Value::Bool(true) => args.push(flag),
            Value::Array(items) if items.iter().all(Value::is_string) => {
                args.push(flag);
                args.extend(items.iter().filter_map(scalar));
            }
            Value::Array(items) => {
                let parts = items
                    .iter()
                    .map(|v| {
                        scalar(v).ok_or_else(|| CliError::spec(format!("'{key}': bad list entry")))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                args.push(format!("{flag}={}", parts.join(",")));
            }
            Value::Object(_) => {
                return Err(CliError::spec(format!(
                    "'{key}': nested objects are not flags"
                )))
            }
            v => args.push(format!("{flag}={}", scalar(v).unwrap_or_default())),
        }
    }
    Ok(args)
}

pub fn load(path: &Path) -> Result<Cli, CliError> {
    let text = read_text(path)?;
    let spec: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::spec(format!("{}: {e}", path.display())))?;
    let cli = Cli::try_parse_from(to_args(&spec)?)
        .map_err(|e| CliError::spec(format!("{}: {}", path.display(), e.to_string().trim())))?;
    if matches!(cli.command, Command::Run(_)) {
        return Err(CliError::spec("a spec cannot itself run a spec"));
    }
    Ok(cli)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn flags_from_json() {
        let args = to_args(&json!({
            "command": "physics linear-potential",
            "classical": true,
            "quantum": false,
            "t_end": 2,
            "f": "const:1",
            "k": [0.5, -1],
            "solutions": ["a.csv", "b.csv"]
        }))
        .unwrap();
        assert_eq!(
            args,
            [
                "lieflow",
                "physics",
                "linear-potential",
                "--classical",
                "--f=const:1",
                "--k=0.5,-1",
                "--solutions",
                "a.csv",
                "b.csv",
                "--t-end=2"
            ]
        );
    }

    #[test]
    fn rejects_nested_objects() {
        assert!(to_args(&json!({"command": "reduce", "b": {"x": 1}})).is_err());
        assert!(to_args(&json!(["solve-group"])).is_err());
    }
}
