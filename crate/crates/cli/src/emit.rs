//! Serialisation of an [`Output`] table to JSON or CSV.

use serde_json::{json, Map, Value};

use crate::run::{Field, Output};

/// 17 significant digits — enough to round-trip any f64.
fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

fn field_json(f: &Field) -> Value {
    match f {
        Field::Str(s) => Value::String(s.clone()),
        Field::Num(v) => json!(v),
        Field::Int(v) => json!(v),
        Field::Bool(v) => json!(v),
        Field::Empty => Value::Null,
    }
}

pub fn to_json(out: &Output) -> String {
    let results: Vec<Value> = out
        .rows
        .iter()
        .map(|row| {
            let mut obj = Map::new();
            for (col, field) in out.columns.iter().zip(row) {
                obj.insert((*col).to_string(), field_json(field));
            }
            Value::Object(obj)
        })
        .collect();
    let errors: Vec<Value> = out
        .errors
        .iter()
        .map(|e| json!({ "context": e.context, "error": e.error }))
        .collect();
    let doc = json!({ "config": out.config, "results": results, "errors": errors });
    serde_json::to_string_pretty(&doc).expect("JSON serialisation cannot fail")
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn field_csv(f: &Field) -> String {
    match f {
        Field::Str(s) => csv_escape(s),
        Field::Num(v) => fmt_num(*v),
        Field::Int(v) => v.to_string(),
        Field::Bool(v) => v.to_string(),
        Field::Empty => String::new(),
    }
}

pub fn to_csv(out: &Output) -> String {
    let mut buf = String::new();
    buf.push_str(&out.columns.join(","));
    buf.push('\n');
    for row in &out.rows {
        let line: Vec<String> = row.iter().map(field_csv).collect();
        buf.push_str(&line.join(","));
        buf.push('\n');
    }
    buf
}
