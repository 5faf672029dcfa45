//! Canonical JSON text: object keys sorted bytewise, no insignificant
//! whitespace, floats in shortest round-trip form.

use serde::Serialize;
use serde_json::Value;

/// Writes `value` canonically. Panics only if `T`'s `Serialize` impl fails,
/// which none of the document types do.
pub fn to_canonical_string<T: Serialize + ?Sized>(value: &T) -> String {
    let value = serde_json::to_value(value).expect("document types serialize to JSON");
    let mut out = String::new();
    write_value(&value, &mut out);
    out
}

pub fn value_to_canonical_string(value: &Value) -> String {
    let mut out = String::new();
    write_value(value, &mut out);
    out
}

fn write_value(value: &Value, out: &mut String) {
    match value {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        // serde_json prints f64 through ryu: shortest round-trip digits.
        Value::Number(n) => out.push_str(&n.to_string()),
        Value::String(s) => write_string(s, out),
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            let mut entries: Vec<(&String, &Value)> = map.iter().collect();
            entries.sort_unstable_by(|a, b| a.0.as_bytes().cmp(b.0.as_bytes()));
            out.push('{');
            for (i, (k, v)) in entries.into_iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_string(k, out);
                out.push(':');
                write_value(v, out);
            }
            out.push('}');
        }
    }
}

fn write_string(s: &str, out: &mut String) {
    out.push_str(&serde_json::to_string(s).expect("strings always serialize"));
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn keys_sorted_at_every_depth() {
        let v = json!({"b": 1, "a": {"z": [1, {"y": 2, "x": 3}], "c": null}});
        assert_eq!(
            value_to_canonical_string(&v),
            r#"{"a":{"c":null,"z":[1,{"x":3,"y":2}]},"b":1}"#
        );
    }

    #[test]
    fn floats_shortest_round_trip() {
        let v = json!([0.1, 1.0, 1e300, -2.5e-8, 78.114]);
        let text = value_to_canonical_string(&v);
        assert_eq!(text, "[0.1,1.0,1e+300,-2.5e-8,78.114]");
        let back: Vec<f64> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, vec![0.1, 1.0, 1e300, -2.5e-8, 78.114]);
    }

    #[test]
    fn strings_escaped() {
        let v = json!({"k\"": "line\nΔ"});
        assert_eq!(value_to_canonical_string(&v), "{\"k\\\"\":\"line\\nΔ\"}");
    }
}
