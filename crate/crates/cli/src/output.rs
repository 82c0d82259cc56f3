//! JSON and CSV emission.
//!
//! CSV columns: the swept and fixed parameters in `PARAMS` order, then
//! `quantity`, `value`, `breakdown` (compact JSON) and `error`.

use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Value};

use crate::eval::Record;
use crate::plan::{Plan, PARAMS};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

pub fn write_text(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Emits a serializable value; lists of flat objects become CSV rows.
pub fn emit_value<T: Serialize>(v: &T, format: Format, path: Option<&Path>) -> Result<()> {
    let value = serde_json::to_value(v)?;
    match format {
        Format::Json => write_text(&(serde_json::to_string_pretty(&value)? + "\n"), path),
        Format::Csv => {
            let rows = match value {
                Value::Array(rows) => rows,
                other => vec![other],
            };
            let mut w = csv::Writer::from_writer(Vec::new());
            if let Some(Value::Object(first)) = rows.first() {
                w.write_record(first.keys())?;
            }
            for row in &rows {
                if let Value::Object(obj) = row {
                    w.write_record(obj.values().map(cell))?;
                }
            }
            write_text(&String::from_utf8(w.into_inner()?)?, path)
        }
    }
}

pub fn emit_records(plan: &Plan, records: &[Record]) -> Result<()> {
    let args = &plan.args;
    let path = args.output.as_deref();
    match args.out {
        Format::Json => {
            let doc = json!({
                "schema_version": SCHEMA_VERSION,
                "plan": {
                    "command": plan.command,
                    "points": plan.points.len(),
                    "args": compact(serde_json::to_value(args)?),
                },
                "results": records,
            });
            write_text(&(serde_json::to_string_pretty(&doc)? + "\n"), path)
        }
        Format::Csv => {
            let used: Vec<&str> = PARAMS
                .iter()
                .copied()
                .filter(|n| plan.points.first().is_some_and(|p| p.get(n).is_some()))
                .collect();
            let quantity = args.quantity.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut header: Vec<&str> = used.clone();
            header.extend(["quantity", "value", "breakdown", "error"]);
            w.write_record(&header)?;
            for r in records {
                let mut row: Vec<String> = used.iter().map(|n| r.inputs.get(*n).map(cell).unwrap_or_default()).collect();
                row.push(quantity.clone());
                row.push(cell(&r.value));
                row.push(if r.breakdown.is_null() { String::new() } else { r.breakdown.to_string() });
                row.push(r.error.clone().unwrap_or_default());
                w.write_record(&row)?;
            }
            write_text(&String::from_utf8(w.into_inner()?)?, path)
        }
    }
}

/// Drops unset options and false flags from the plan echo.
fn compact(v: Value) -> Value {
    match v {
        Value::Object(map) => Value::Object(
            map.into_iter()
                .filter(|(_, v)| !v.is_null() && *v != Value::Bool(false))
                .collect(),
        ),
        other => other,
    }
}
