//! JSON and CSV output with numbers written to 17 significant digits.

use serde_json::Value;
use std::fmt::Write;

/// `x` with 17 significant digits, `.` as decimal separator, in plain
/// notation for moderate exponents. Non-finite values become `null`.
pub fn fmt_f64(x: f64) -> String {
    if !x.is_finite() {
        return "null".to_string();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0.0" } else { "0.0" }.to_string();
    }
    let sci = format!("{x:.16e}");
    let (_, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..17).contains(&exp) {
        let digits = (16 - exp).max(1) as usize;
        format!("{x:.digits$}")
    } else {
        sci
    }
}

/// Pretty-printed JSON with two-space indentation.
pub fn to_string(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v, 0);
    out.push('\n');
    out
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                out.push_str(&fmt_f64(n.as_f64().unwrap_or(f64::NAN)));
            } else {
                let _ = write!(out, "{n}");
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            // short numeric arrays stay on one line
            if items.len() <= 4 && items.iter().all(|x| x.is_number() || x.is_null()) {
                out.push('[');
                for (k, x) in items.iter().enumerate() {
                    if k > 0 {
                        out.push_str(", ");
                    }
                    write_value(out, x, indent);
                }
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (k, x) in items.iter().enumerate() {
                pad(out, indent + 1);
                write_value(out, x, indent + 1);
                if k + 1 < items.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            pad(out, indent);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            let n = map.len();
            for (k, (key, x)) in map.iter().enumerate() {
                pad(out, indent + 1);
                out.push_str(&Value::String(key.clone()).to_string());
                out.push_str(": ");
                write_value(out, x, indent + 1);
                if k + 1 < n {
                    out.push(',');
                }
                out.push('\n');
            }
            pad(out, indent);
            out.push('}');
        }
    }
}

fn pad(out: &mut String, indent: usize) {
    for _ in 0..indent {
        out.push_str("  ");
    }
}

/// One CSV row; fields containing separators or quotes are quoted.
pub fn csv_row(fields: &[String]) -> String {
    let mut line = fields
        .iter()
        .map(|f| {
            if f.contains([',', '"', '\n']) {
                format!("\"{}\"", f.replace('"', "\"\""))
            } else {
                f.clone()
            }
        })
        .collect::<Vec<_>>()
        .join(",");
    line.push('\n');
    line
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(fmt_f64(0.1), "0.10000000000000001");
        assert_eq!(fmt_f64(2.0), "2.0000000000000000");
        assert_eq!(fmt_f64(-2.5e-3), "-0.0025000000000000001");
        assert_eq!(fmt_f64(1e20), "1.0000000000000000e20");
        assert_eq!(fmt_f64(f64::NAN), "null");
        assert_eq!(fmt_f64(0.0), "0.0");
    }

    #[test]
    fn pretty_printing_is_valid_json() {
        let v = serde_json::json!({"a": [1.5, 2, null], "b": {"c": "x\"y", "d": []}, "e": true});
        let s = to_string(&v);
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn csv_quoting() {
        assert_eq!(csv_row(&["a".into(), "b,c".into()]), "a,\"b,c\"\n");
    }

    proptest! {
        #[test]
        fn formatted_numbers_round_trip(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL) {
            let s = fmt_f64(x);
            prop_assert_eq!(s.parse::<f64>().unwrap(), x);
        }
    }
}
