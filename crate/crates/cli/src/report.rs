//! JSON report and CSV output helpers.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{Map, Value};

pub const SCHEMA_VERSION: &str = "1";

/// `v` with 17 significant digits, so the value round-trips exactly.
pub fn decimal(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:.16e}")
    }
}

/// Rewrites every floating-point number in `value` as a [`decimal`] string.
/// Integers are left alone.
fn decimalize(value: Value) -> Value {
    match value {
        Value::Number(n) if n.is_f64() => Value::String(decimal(n.as_f64().unwrap_or(f64::NAN))),
        Value::Array(items) => Value::Array(items.into_iter().map(decimalize).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, decimalize(v))).collect()),
        other => other,
    }
}

/// Builds `{"schema_version": "1", "command": ..., <body fields>}`.
pub fn envelope(command: &str, body: impl Serialize) -> Result<Value> {
    let mut map = Map::new();
    map.insert("schema_version".into(), SCHEMA_VERSION.into());
    map.insert("command".into(), command.into());
    match decimalize(serde_json::to_value(body)?) {
        Value::Object(fields) => map.extend(fields),
        other => {
            map.insert("result".into(), other);
        }
    }
    Ok(Value::Object(map))
}

pub fn write_json(path: &Path, report: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))
}
