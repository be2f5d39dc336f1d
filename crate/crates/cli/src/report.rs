//! JSON report helpers. Reals are rounded to 12 significant digits, except
//! strategy coordinates, which keep full precision so a report can be fed
//! back through `believes`. Non-finite values are written as strings.

use std::fs;
use std::io::Write;
use std::path::Path;

use idsig::format::round12;
use idsig::SenderStrategy;
use serde_json::{json, Value};

use crate::CliError;

fn non_finite(x: f64) -> Value {
    Value::String(
        if x.is_nan() {
            "nan"
        } else if x > 0.0 {
            "inf"
        } else {
            "-inf"
        }
        .into(),
    )
}

pub fn real(x: f64) -> Value {
    if x.is_finite() {
        json!(round12(x))
    } else {
        non_finite(x)
    }
}

pub fn exact(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        non_finite(x)
    }
}

pub fn strategy(s: &SenderStrategy) -> Value {
    json!({ "m_A": exact(s.m_a), "m_B": exact(s.m_b), "n_A": exact(s.n_a), "n_B": exact(s.n_b) })
}

/// Reads a strategy written by [`strategy`].
pub fn parse_strategy(v: &Value) -> Option<SenderStrategy> {
    let get = |k: &str| v.get(k)?.as_f64();
    SenderStrategy::new(get("m_A")?, get("m_B")?, get("n_A")?, get("n_B")?).ok()
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::Domain(format!("cannot write {}: {e}", path.display())))
}

/// Pretty-prints `report` to `stdout` and, when given, to `out`.
pub fn emit(report: &Value, stdout: &mut dyn Write, out: Option<&Path>) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(report).expect("report serializes");
    text.push('\n');
    if let Some(path) = out {
        write_file(path, text.as_bytes())?;
    }
    stdout.write_all(text.as_bytes()).map_err(|e| CliError::Domain(format!("cannot write report: {e}")))
}
