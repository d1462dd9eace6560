//! CSV tables and JSON files for algebras and representations.

use crate::algebra::{BracketEntry, LieAlgebra};
use crate::error::{Error, Result};
use crate::rep::{AnyRep, MatrixRep};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::fmt::Write as _;

/// Fixed 17-significant-digit formatting so that outputs round-trip and
/// repeated runs are byte-identical.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.16e}")
    }
}

/// Writes `# comment` lines, a header and numeric rows.
pub fn write_csv<I, R>(header: &[String], rows: I, comments: &[String]) -> String
where
    I: IntoIterator<Item = R>,
    R: AsRef<[f64]>,
{
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.as_ref().iter().map(|&x| fmt_f64(x)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub comments: Vec<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    /// Value of a `# key=value` comment line.
    pub fn comment_value(&self, key: &str) -> Option<&str> {
        self.comments.iter().find_map(|c| {
            c.strip_prefix(key)
                .and_then(|rest| rest.strip_prefix('='))
                .map(str::trim)
        })
    }
}

/// Parses a numeric CSV with a header line; `#` lines are collected as
/// comments and blank lines skipped. `inf`/`-inf` are accepted.
pub fn read_csv(text: &str) -> Result<Table> {
    let mut comments = Vec::new();
    let mut header: Option<Vec<String>> = None;
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(c) = line.strip_prefix('#') {
            comments.push(c.trim().to_string());
            continue;
        }
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        match &header {
            None => header = Some(cells.iter().map(|s| s.to_string()).collect()),
            Some(h) => {
                if cells.len() != h.len() {
                    return Err(Error::Format(format!(
                        "line {}: {} cells, header has {}",
                        lineno + 1,
                        cells.len(),
                        h.len()
                    )));
                }
                let row = cells
                    .iter()
                    .map(|c| {
                        c.parse::<f64>().map_err(|_| {
                            Error::Format(format!("line {}: bad number '{c}'", lineno + 1))
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                rows.push(row);
            }
        }
    }
    let header = header.ok_or_else(|| Error::Format("missing CSV header".into()))?;
    Ok(Table {
        comments,
        header,
        rows,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct AlgebraFile {
    dim: usize,
    #[serde(default)]
    brackets: Vec<BracketEntry>,
    #[serde(default)]
    labels: Vec<String>,
}

/// Parses `{ "dim": r, "brackets": [{"i","j","coeffs":[[γ,v],…]}], "labels": […] }`.
pub fn algebra_from_json(text: &str) -> Result<LieAlgebra> {
    let file: AlgebraFile =
        serde_json::from_str(text).map_err(|e| Error::Format(format!("algebra file: {e}")))?;
    LieAlgebra::from_brackets(file.dim, &file.brackets, file.labels)
}

pub fn algebra_to_json(alg: &LieAlgebra) -> String {
    let file = AlgebraFile {
        dim: alg.dim(),
        brackets: alg.brackets(),
        labels: alg.labels().to_vec(),
    };
    serde_json::to_string_pretty(&file).expect("algebra serializes")
}

/// Parses `{ "size": n, "scalars": "real"|"complex", "mats": [[…], …] }`.
/// Each matrix is a flat row-major array; complex entries are `[re, im]`
/// pairs or plain numbers.
pub fn representation_from_json(text: &str, algebra: LieAlgebra) -> Result<AnyRep> {
    let v: Value = serde_json::from_str(text)
        .map_err(|e| Error::Format(format!("representation file: {e}")))?;
    let size = v["size"]
        .as_u64()
        .ok_or_else(|| Error::Format("representation file: missing 'size'".into()))?
        as usize;
    let scalars = v["scalars"].as_str().unwrap_or("real");
    let mats = v["mats"]
        .as_array()
        .ok_or_else(|| Error::Format("representation file: missing 'mats'".into()))?;
    let entries = |m: &Value| -> Result<Vec<Complex64>> {
        let arr = m
            .as_array()
            .ok_or_else(|| Error::Format("representation file: matrix must be an array".into()))?;
        if arr.len() != size * size {
            return Err(Error::Format(format!(
                "representation file: matrix has {} entries, expected {}",
                arr.len(),
                size * size
            )));
        }
        arr.iter()
            .map(|e| match e {
                Value::Number(x) => Ok(Complex64::new(x.as_f64().unwrap_or(f64::NAN), 0.0)),
                Value::Array(p) if p.len() == 2 => match (p[0].as_f64(), p[1].as_f64()) {
                    (Some(re), Some(im)) => Ok(Complex64::new(re, im)),
                    _ => Err(Error::Format(
                        "representation file: bad complex entry".into(),
                    )),
                },
                _ => Err(Error::Format(
                    "representation file: bad matrix entry".into(),
                )),
            })
            .collect()
    };
    let parsed = mats.iter().map(entries).collect::<Result<Vec<_>>>()?;
    match scalars {
        "real" => {
            if parsed.iter().flatten().any(|z| z.im != 0.0) {
                return Err(Error::Format(
                    "representation file: complex entry in a real representation".into(),
                ));
            }
            let ms = parsed
                .iter()
                .map(|m| DMatrix::from_row_iterator(size, size, m.iter().map(|z| z.re)))
                .collect();
            Ok(AnyRep::Real(MatrixRep::new(algebra, ms)?))
        }
        "complex" => {
            let ms = parsed
                .iter()
                .map(|m| DMatrix::from_row_iterator(size, size, m.iter().copied()))
                .collect();
            Ok(AnyRep::Complex(MatrixRep::new(algebra, ms)?))
        }
        other => Err(Error::Format(format!(
            "representation file: scalars must be 'real' or 'complex', got '{other}'"
        ))),
    }
}
