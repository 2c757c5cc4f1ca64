//! Deterministic JSON (15 significant digits) and aligned-table rendering.

use serde_json::Value;

/// Shortest decimal with at most 15 significant digits.
pub fn number(x: f64) -> String {
    if !x.is_finite() {
        return "null".into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.14e}");
    let (mant, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..15).contains(&exp) {
        let decimals = (14 - exp).max(0) as usize;
        let rounded: f64 = sci.parse().expect("valid float");
        trim(&format!("{rounded:.decimals$}"))
    } else {
        format!("{}e{exp}", trim(mant))
    }
}

fn trim(s: &str) -> String {
    if s.contains('.') {
        let t = s.trim_end_matches('0').trim_end_matches('.');
        if t == "-0" { "0".into() } else { t.into() }
    } else {
        s.into()
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Number(n) => match (n.as_i64(), n.as_u64()) {
            (Some(i), _) => i.to_string(),
            (_, Some(u)) => u.to_string(),
            _ => number(n.as_f64().unwrap_or(f64::NAN)),
        },
        Value::String(s) => serde_json::to_string(s).expect("string encodes"),
        other => other.to_string(),
    }
}

pub fn json(v: &Value) -> String {
    let mut out = String::new();
    write_json(v, 0, &mut out);
    out.push('\n');
    out
}

fn write_json(v: &Value, depth: usize, out: &mut String) {
    let pad = |d: usize| "  ".repeat(d);
    match v {
        Value::Array(a) if a.is_empty() => out.push_str("[]"),
        Value::Array(a) if a.iter().all(|x| !x.is_array() && !x.is_object()) => {
            out.push('[');
            out.push_str(&a.iter().map(scalar).collect::<Vec<_>>().join(", "));
            out.push(']');
        }
        Value::Array(a) => {
            out.push_str("[\n");
            for (i, x) in a.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                write_json(x, depth + 1, out);
                out.push_str(if i + 1 < a.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push(']');
        }
        Value::Object(m) if m.is_empty() => out.push_str("{}"),
        Value::Object(m) => {
            out.push_str("{\n");
            for (i, (k, x)) in m.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                out.push_str(&serde_json::to_string(k).expect("key encodes"));
                out.push_str(": ");
                write_json(x, depth + 1, out);
                out.push_str(if i + 1 < m.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push('}');
        }
        s => out.push_str(&scalar(s)),
    }
}

/// Flattened `path  value` lines, left-aligned.
pub fn table(v: &Value) -> String {
    let mut rows = Vec::new();
    flatten(v, String::new(), &mut rows);
    let w = rows.iter().map(|r| r.0.chars().count()).max().unwrap_or(0);
    let mut out = String::new();
    for (k, x) in rows {
        let fill = w - k.chars().count();
        out.push_str(&format!("{k}{}  {x}\n", " ".repeat(fill)));
    }
    out
}

fn flatten(v: &Value, path: String, rows: &mut Vec<(String, String)>) {
    let join = |p: &str, k: &str| if p.is_empty() { k.to_string() } else { format!("{p}.{k}") };
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                flatten(x, join(&path, k), rows);
            }
        }
        Value::Array(a) if a.iter().all(|x| !x.is_array() && !x.is_object()) => {
            rows.push((path, a.iter().map(plain).collect::<Vec<_>>().join(" ")));
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten(x, format!("{path}[{i}]"), rows);
            }
        }
        s => rows.push((path, plain(s))),
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => scalar(other),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fifteen_digits() {
        assert_eq!(number(5f64.sqrt()), "2.23606797749979");
        assert_eq!(number(-2.0), "-2");
        assert_eq!(number(0.1 + 0.2), "0.3");
        assert_eq!(number(1e-20), "1e-20");
        assert_eq!(number(-3.5e-7), "-3.5e-7");
        assert_eq!(number(123456.0), "123456");
        assert_eq!(number(-0.0), "0");
        assert_eq!(number(f64::NAN), "null");
    }

    #[test]
    fn json_keeps_order() {
        let v: Value = serde_json::from_str(r#"{"b": 1.25, "a": [1, 2], "c": {"x": null}}"#).unwrap();
        assert_eq!(json(&v), "{\n  \"b\": 1.25,\n  \"a\": [1, 2],\n  \"c\": {\n    \"x\": null\n  }\n}\n");
        assert!(table(&v).contains("c.x  -"));
    }
}
