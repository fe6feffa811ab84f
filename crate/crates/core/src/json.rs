//! Canonical JSON: sorted keys, two-space indent, floats with exactly six
//! decimals. Byte equality of two documents is then equality of content.

use std::fmt::Write;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};

pub fn to_canonical_string<T: Serialize>(value: &T) -> Result<String> {
    let value = serde_json::to_value(value).map_err(|source| Error::Json {
        context: "serialize".into(),
        source,
    })?;
    let mut out = String::new();
    write_value(&mut out, &value, 0);
    out.push('\n');
    Ok(out)
}

pub fn from_str<T: DeserializeOwned>(text: &str, context: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|source| Error::Json {
        context: context.to_string(),
        source,
    })
}

fn indent(out: &mut String, level: usize) {
    for _ in 0..level {
        out.push_str("  ");
    }
}

fn write_value(out: &mut String, value: &Value, level: usize) {
    match value {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(u) = n.as_u64() {
                write!(out, "{u}").unwrap();
            } else if let Some(i) = n.as_i64() {
                write!(out, "{i}").unwrap();
            } else {
                let f = n.as_f64().unwrap_or(0.0) + 0.0;
                write!(out, "{f:.6}").unwrap();
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).unwrap()),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            // Arrays of scalars stay on one line: colors, points, intervals.
            if items.iter().all(|v| !v.is_array() && !v.is_object()) {
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_value(out, item, level);
                }
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                indent(out, level + 1);
                write_value(out, item, level + 1);
                if i + 1 < items.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            indent(out, level);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            // serde_json's default map is a BTreeMap: iteration is sorted.
            let len = map.len();
            for (i, (key, item)) in map.iter().enumerate() {
                indent(out, level + 1);
                out.push_str(&serde_json::to_string(key).unwrap());
                out.push_str(": ");
                write_value(out, item, level + 1);
                if i + 1 < len {
                    out.push(',');
                }
                out.push('\n');
            }
            indent(out, level);
            out.push('}');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::Deserialize;

    #[derive(Serialize, Deserialize, PartialEq, Debug)]
    struct Sample {
        zeta: f64,
        alpha: u64,
        colors: [f64; 3],
        nested: Vec<Inner>,
    }

    #[derive(Serialize, Deserialize, PartialEq, Debug)]
    struct Inner {
        name: String,
        value: f64,
    }

    #[test]
    fn keys_sorted_and_floats_fixed() {
        let s = Sample {
            zeta: 8.0,
            alpha: 3,
            colors: [0.5, 1.0, -0.0],
            nested: vec![Inner {
                name: "a\"b".into(),
                value: 0.1234567,
            }],
        };
        let text = to_canonical_string(&s).unwrap();
        let expected = "{\n  \"alpha\": 3,\n  \"colors\": [0.500000, 1.000000, 0.000000],\n  \"nested\": [\n    {\n      \"name\": \"a\\\"b\",\n      \"value\": 0.123457\n    }\n  ],\n  \"zeta\": 8.000000\n}\n";
        assert_eq!(text, expected);
    }

    #[test]
    fn grid_values_round_trip_exactly() {
        let s = Sample {
            zeta: crate::rng::q6(7.654321987),
            alpha: u64::MAX,
            colors: [0.000001, 12.5, 4.250001],
            nested: vec![],
        };
        let text = to_canonical_string(&s).unwrap();
        let back: Sample = from_str(&text, "sample").unwrap();
        assert_eq!(back, s);
        assert_eq!(to_canonical_string(&back).unwrap(), text);
    }
}
