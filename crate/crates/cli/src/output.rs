//! Rendering. JSON floats carry 12 significant digits and text output
//! prints the same rounded values.

use serde::Serialize;
use serde_json::{Map, Number, Value};

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

/// Rounds to 12 significant digits. Non-finite values pass through.
pub fn r12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

/// Text form of a rounded value.
pub fn num(x: f64) -> String {
    let x = r12(x);
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let a = x.abs();
    if a != 0.0 && !(1e-4..1e9).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = r12(n.as_f64().expect("f64 number"));
            Number::from_f64(x).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_value).collect()),
        Value::Object(o) => {
            Value::Object(o.into_iter().map(|(k, v)| (k, round_value(v))).collect())
        }
        other => other,
    }
}

/// One JSON object: the body's fields plus `schema_version` and `command`.
/// Keys are emitted in sorted order.
pub fn json_document(command: &str, body: &impl Serialize) -> CliResult<String> {
    let body = serde_json::to_value(body).map_err(|e| CliError::Internal(e.to_string()))?;
    let Value::Object(fields) = round_value(body) else {
        return Err(CliError::Internal("JSON body is not an object".into()));
    };
    let mut doc = Map::new();
    doc.insert("schema_version".into(), SCHEMA_VERSION.into());
    doc.insert("command".into(), command.into());
    doc.extend(fields);
    serde_json::to_string_pretty(&Value::Object(doc)).map_err(|e| CliError::Internal(e.to_string()))
}
