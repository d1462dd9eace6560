use crate::report::CliError;
use crate::Coefficients;
use lieflow_core::io::{algebra_from_json, read_csv, representation_from_json, Table};
use lieflow_core::{AnyRep, CoefficientCurve, LieAlgebra};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::io::Write;
use std::path::{Path, PathBuf};

pub fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::spec(format!("cannot read {}: {e}", path.display())))
}

pub fn read_table(path: &Path) -> Result<Table, CliError> {
    read_csv(&read_text(path)?).map_err(|e| CliError::spec(format!("{}: {e}", path.display())))
}

/// Writes CSV to `out`, or to stdout.
pub fn write_output(out: &Option<PathBuf>, csv: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, csv)
            .map_err(|e| CliError::spec(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(csv.as_bytes())
            .map_err(|e| CliError::spec(format!("stdout: {e}"))),
    }
}

fn is_file_arg(s: &str) -> bool {
    s.ends_with(".json") || Path::new(s).is_file()
}

pub fn load_algebra(arg: &str) -> Result<LieAlgebra, CliError> {
    if is_file_arg(arg) {
        Ok(algebra_from_json(&read_text(Path::new(arg))?)?)
    } else {
        Ok(LieAlgebra::builtin(arg)?)
    }
}

/// Resolves `--algebra` / `--rep`. A builtin algebra tag alone selects its
/// defining representation; a representation file needs the algebra.
pub fn load_rep(algebra: Option<&str>, rep: Option<&str>) -> Result<AnyRep, CliError> {
    match (algebra, rep) {
        (None, None) => Err(CliError::spec("one of --algebra or --rep is required")),
        (Some(a), None) if is_file_arg(a) => Err(CliError::spec(
            "an algebra file needs a representation (--rep)",
        )),
        (Some(a), None) => Ok(AnyRep::builtin(a)?),
        (alg, Some(r)) if is_file_arg(r) => {
            let a = alg.ok_or_else(|| CliError::spec("a representation file needs --algebra"))?;
            Ok(representation_from_json(
                &read_text(Path::new(r))?,
                load_algebra(a)?,
            )?)
        }
        (alg, Some(r)) => {
            let rep = AnyRep::builtin(r)?;
            if let Some(a) = alg {
                check_same_algebra(&load_algebra(a)?, rep.algebra(), a, r)?;
            }
            Ok(rep)
        }
    }
}

fn check_same_algebra(a: &LieAlgebra, b: &LieAlgebra, ta: &str, tb: &str) -> Result<(), CliError> {
    let r = a.dim();
    let same = r == b.dim()
        && (0..r)
            .all(|i| (0..r).all(|j| (0..r).all(|k| (a.f(i, j, k) - b.f(i, j, k)).abs() <= 1e-12)));
    if same {
        Ok(())
    } else {
        Err(CliError::spec(format!(
            "representation '{tb}' does not carry algebra '{ta}'"
        )))
    }
}

/// Reads a `t,c0,c1,…` table into a sampled curve of dimension `r`.
pub fn sampled_curve(path: &Path, r: usize) -> Result<CoefficientCurve, CliError> {
    let table = read_table(path)?;
    if table.header.first().map(String::as_str) != Some("t") {
        return Err(CliError::spec(format!(
            "{}: first column must be 't'",
            path.display()
        )));
    }
    if table.header.len() != r + 1 {
        return Err(CliError::spec(format!(
            "{}: expected {r} coefficient columns, found {}",
            path.display(),
            table.header.len() - 1
        )));
    }
    let ts = table.rows.iter().map(|row| row[0]).collect();
    let values = table.rows.iter().map(|row| row[1..].to_vec()).collect();
    Ok(CoefficientCurve::sampled(ts, values)?)
}

pub fn load_curve(c: &Coefficients, r: usize) -> Result<CoefficientCurve, CliError> {
    let curve = match (&c.b, &c.b_file) {
        (Some(s), _) => CoefficientCurve::parse(s)?,
        (None, Some(path)) => sampled_curve(path, r)?,
        (None, None) => {
            return Err(CliError::spec(
                "coefficients are required (--b or --b-file)",
            ))
        }
    };
    if curve.dim() != r {
        return Err(CliError::spec(format!(
            "coefficient curve has {} components, the algebra has dimension {r}",
            curve.dim()
        )));
    }
    Ok(curve)
}

/// Comma-separated numbers; `inf` and `-inf` are accepted.
pub fn parse_numbers(s: &str, what: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| CliError::spec(format!("{what}: bad number '{x}'")))
        })
        .collect()
}

pub fn parse_indices(s: &str, what: &str) -> Result<Vec<usize>, CliError> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<usize>()
                .map_err(|_| CliError::spec(format!("{what}: bad index '{x}'")))
        })
        .collect()
}

/// Seed for randomized report checks, from `LIEFLOW_SEED` (default 0).
pub fn seed() -> Result<u64, CliError> {
    match std::env::var("LIEFLOW_SEED") {
        Ok(s) => s.trim().parse().map_err(|_| {
            CliError::spec(format!(
                "LIEFLOW_SEED must be an unsigned integer, got '{s}'"
            ))
        }),
        Err(_) => Ok(0),
    }
}

/// `count` random index pairs below `n`.
pub fn sample_pairs(n: usize, count: usize, seed: u64) -> Vec<(usize, usize)> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..count)
        .map(|_| (rng.random_range(0..n), rng.random_range(0..n)))
        .collect()
}
