use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::args::Format;
use crate::config::{Failure, Outcome};

/// What a subcommand produces.
pub struct Report {
    pub json: Value,
    /// Table for `--format csv`; one-record reports are flattened when absent.
    pub csv: Option<String>,
    /// Native text output used when no format was requested.
    pub text: Option<String>,
}

impl Report {
    pub fn new<T: Serialize>(value: &T) -> Self {
        Self {
            json: serde_json::to_value(value).expect("reports serialize"),
            csv: None,
            text: None,
        }
    }

    pub fn with_csv(mut self, csv: String) -> Self {
        self.csv = Some(csv);
        self
    }

    pub fn with_text(mut self, text: String) -> Self {
        self.text = Some(text);
        self
    }

    pub fn render(&self, format: Option<Format>) -> String {
        match (format, &self.text) {
            (None, Some(text)) => text.clone(),
            (Some(Format::Csv), _) => self.csv.clone().unwrap_or_else(|| flatten_csv(&self.json)),
            _ => serde_json::to_string(&self.json).expect("json") + "\n",
        }
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Array(items) if items.iter().all(|i| !i.is_array() && !i.is_object()) => {
            items.iter().map(scalar).collect::<Vec<_>>().join(";")
        }
        Value::Array(_) | Value::Object(_) => v.to_string(),
        _ => v.to_string(),
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, child, out);
            }
        }
        _ => out.push((prefix.to_string(), scalar(v))),
    }
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Header line of dotted keys plus one value line.
pub fn flatten_csv(v: &Value) -> String {
    let mut pairs = Vec::new();
    flatten("", v, &mut pairs);
    let mut out = String::new();
    let _ = writeln!(out, "{}", pairs.iter().map(|p| quote(&p.0)).collect::<Vec<_>>().join(","));
    let _ = writeln!(out, "{}", pairs.iter().map(|p| quote(&p.1)).collect::<Vec<_>>().join(","));
    out
}

pub fn emit(text: &str, out: Option<&Path>) -> Outcome<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| {
            Failure::Domain(apfourier::Error::Io {
                path: path.display().to_string(),
                message: e.to_string(),
            })
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| {
                    Failure::Domain(apfourier::Error::Io {
                        path: "<stdout>".into(),
                        message: e.to_string(),
                    })
                })
        }
    }
}
