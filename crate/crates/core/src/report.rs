//! Report emission.
//!
//! JSON output is produced from any `Serialize` value with a fixed layout:
//! two-space indentation, struct field order preserved, integers printed as
//! integers and every floating-point number printed in scientific notation
//! with 17 significant digits (`{:.16e}`), which round-trips `f64` exactly.
//! Non-finite floats become `null`. Identical inputs therefore give
//! byte-identical text.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{Number, Value};

use crate::essential::BoundReport;

/// Bumped whenever a field is added, removed or renamed.
pub const SCHEMA_VERSION: u32 = 1;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Formats a float with 17 significant digits.
pub fn format_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

fn format_number(n: &Number) -> String {
    if let Some(u) = n.as_u64() {
        u.to_string()
    } else if let Some(i) = n.as_i64() {
        i.to_string()
    } else {
        format_f64(n.as_f64().unwrap_or(f64::NAN))
    }
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let pad = |out: &mut String, level: usize| {
        for _ in 0..level {
            out.push_str("  ");
        }
    };
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => out.push_str(&format_number(n)),
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            // short numeric arrays such as [re, im] pairs stay on one line
            if items.iter().all(|x| x.is_number()) && items.len() <= 4 {
                out.push('[');
                for (i, x) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_value(out, x, indent);
                }
                out.push(']');
                return;
            }
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (i, x) in items.iter().enumerate() {
                pad(out, indent + 1);
                write_value(out, x, indent + 1);
                if i + 1 < items.len() {
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
            for (i, (k, x)) in map.iter().enumerate() {
                pad(out, indent + 1);
                let _ = write!(out, "{}: ", Value::String(k.clone()));
                write_value(out, x, indent + 1);
                if i + 1 < map.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            pad(out, indent);
            out.push('}');
        }
    }
}

/// Serializes `value` with the fixed layout described in the module docs.
pub fn to_json<T: Serialize>(value: &T) -> Result<String, serde_json::Error> {
    let v = serde_json::to_value(value)?;
    let mut out = String::new();
    write_value(&mut out, &v, 0);
    out.push('\n');
    Ok(out)
}

/// Per-δ rows of a bound report as CSV: `delta,S,K,samples_in_region,b_1..b_n`.
pub fn rows_to_csv(report: &BoundReport) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec![
        "delta".to_string(),
        "S".to_string(),
        "K".to_string(),
        "samples_in_region".to_string(),
    ];
    header.extend((1..=report.dim).map(|l| format!("b_{l}")));
    w.write_record(&header)?;
    for row in &report.rows {
        let mut rec = vec![
            format_f64(row.delta),
            format_f64(row.s),
            format_f64(row.k),
            row.samples_in_region.to_string(),
        ];
        rec.extend(row.b_l.iter().map(|&b| format_f64(b)));
        w.write_record(&rec)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::Serialize;

    #[derive(Serialize)]
    struct Sample {
        name: &'static str,
        count: usize,
        value: f64,
        pair: [f64; 2],
        missing: Option<f64>,
        nan: f64,
        list: Vec<Inner>,
    }

    #[derive(Serialize)]
    struct Inner {
        x: f64,
    }

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(format_f64(0.25), "2.5000000000000000e-1");
        assert_eq!(format_f64(0.0), "0.0000000000000000e0");
        assert_eq!(format_f64(-1.0 / 3.0), "-3.3333333333333331e-1");
        assert_eq!(format_f64(f64::INFINITY), "null");
        for x in [0.1, 1.0 / 3.0, 2f64.sqrt(), 1e-300, 123456.789] {
            assert_eq!(format_f64(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn layout_is_stable_and_valid_json() {
        let s = Sample {
            name: "a\"b",
            count: 3,
            value: 0.5,
            pair: [1.0, -2.0],
            missing: None,
            nan: f64::NAN,
            list: vec![Inner { x: 1.5 }],
        };
        let text = to_json(&s).unwrap();
        let expected = r#"{
  "name": "a\"b",
  "count": 3,
  "value": 5.0000000000000000e-1,
  "pair": [1.0000000000000000e0, -2.0000000000000000e0],
  "missing": null,
  "nan": null,
  "list": [
    {
      "x": 1.5000000000000000e0
    }
  ]
}
"#;
        assert_eq!(text, expected);
        let back: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(back["value"], 0.5);
    }
}
