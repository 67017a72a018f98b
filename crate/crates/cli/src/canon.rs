//! Canonical JSON: keys sorted, floats with 17 significant digits.
//! Re-parsing and re-writing a document gives the same bytes.

use serde::Serialize;
use serde_json::Value;
use std::fmt::Write;

pub fn to_string<T: Serialize>(v: &T) -> serde_json::Result<String> {
    Ok(write_value(&serde_json::to_value(v)?))
}

pub fn write_value(v: &Value) -> String {
    let mut out = String::new();
    write(&mut out, v, 0);
    out.push('\n');
    out
}

fn indent(out: &mut String, n: usize) {
    for _ in 0..n {
        out.push_str("  ");
    }
}

fn write(out: &mut String, v: &Value, depth: usize) {
    match v {
        Value::Null | Value::Bool(_) | Value::String(_) => out.push_str(&v.to_string()),
        Value::Number(n) => match (n.as_i64(), n.as_u64()) {
            (Some(i), _) => write!(out, "{i}").unwrap(),
            (_, Some(u)) => write!(out, "{u}").unwrap(),
            _ => write!(out, "{:.16e}", n.as_f64().unwrap()).unwrap(),
        },
        Value::Array(a) if a.is_empty() => out.push_str("[]"),
        Value::Array(a) => {
            out.push_str("[\n");
            for (k, x) in a.iter().enumerate() {
                indent(out, depth + 1);
                write(out, x, depth + 1);
                if k + 1 < a.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            indent(out, depth);
            out.push(']');
        }
        Value::Object(m) if m.is_empty() => out.push_str("{}"),
        Value::Object(m) => {
            // serde_json's default map is a BTreeMap, so iteration is already sorted
            out.push_str("{\n");
            let n = m.len();
            for (k, (key, x)) in m.iter().enumerate() {
                indent(out, depth + 1);
                out.push_str(&Value::String(key.clone()).to_string());
                out.push_str(": ");
                write(out, x, depth + 1);
                if k + 1 < n {
                    out.push(',');
                }
                out.push('\n');
            }
            indent(out, depth);
            out.push('}');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_byte_identical() {
        let v = serde_json::json!({"b": [1.0, 2.5e-17, -3], "a": {"z": null, "y": 0.1}, "c": "x"});
        let s = write_value(&v);
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(write_value(&back), s);
        assert!(s.find("\"a\"").unwrap() < s.find("\"b\"").unwrap());
        assert!(s.contains("1.0000000000000001e-1"));
        assert!(s.contains("1.0000000000000000e0"));
    }
}
