//! Flat CSV rendering of the reports: one `key,value` row per scalar
//! field, with list lengths summarized. The JSON format carries the full
//! certificates; CSV is for spreadsheets and quick diffs.

use serde_json::Value;

pub fn to_rows(kind: &str, report: &Value) -> Vec<(String, String)> {
    let mut rows = vec![("kind".to_string(), kind.to_string())];
    flatten("", report, &mut rows);
    rows
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, v, rows);
            }
        }
        Value::Array(items) => {
            rows.push((format!("{prefix}.len"), items.len().to_string()));
            // scalars inline, structures summarized
            for (i, item) in items.iter().enumerate().take(32) {
                match item {
                    Value::Object(_) | Value::Array(_) => {}
                    _ => flatten(&format!("{prefix}.{i}"), item, rows),
                }
            }
        }
        Value::Null => rows.push((prefix.to_string(), String::new())),
        Value::Bool(b) => rows.push((prefix.to_string(), b.to_string())),
        Value::Number(n) => rows.push((prefix.to_string(), n.to_string())),
        Value::String(s) => rows.push((prefix.to_string(), s.clone())),
    }
}

pub fn render(rows: &[(String, String)]) -> String {
    let mut out = String::from("key,value\n");
    for (k, v) in rows {
        out.push_str(&escape(k));
        out.push(',');
        out.push_str(&escape(v));
        out.push('\n');
    }
    out
}

fn escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
