use std::fmt::Write as _;
use std::path::Path;

use css_coherence::info::RelativeEntropy;
use css_coherence::CssCode;
use serde_json::{json, Map, Value};

use crate::{CliError, CliResult, TableFormat};

/// Key/value lines describing how an artifact was produced.
pub struct Provenance(Vec<(String, String)>);

impl Provenance {
    pub fn new(command: &str) -> Self {
        Self(vec![
            (
                "tool".into(),
                format!("csscoh {}", env!("CARGO_PKG_VERSION")),
            ),
            ("command".into(), command.into()),
        ])
    }

    pub fn code(mut self, selector: &str, code: &CssCode) -> Self {
        self.0.push(("code".into(), selector.into()));
        self.0.push(("code_hash".into(), code.code_hash()));
        self.0.push(("n".into(), code.n().to_string()));
        self.0.push(("k".into(), code.k().to_string()));
        self
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.0.push((key.into(), value.to_string()));
        self
    }

    /// `# key: value` lines, in insertion order.
    pub fn header(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.0 {
            let _ = writeln!(out, "# {k}: {v}");
        }
        out
    }

    pub fn to_json(&self) -> Value {
        Value::Object(
            self.0
                .iter()
                .map(|(k, v)| (k.clone(), Value::String(v.clone())))
                .collect(),
        )
    }
}

pub enum Cell {
    Num(f64),
    Count(usize),
    Bool(bool),
    Rel(RelativeEntropy),
    Missing,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => format_f64(*v),
            Cell::Count(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Rel(RelativeEntropy::Finite(v)) => format_f64(*v),
            Cell::Rel(RelativeEntropy::Infinite) => "inf".into(),
            Cell::Missing => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) if v.is_finite() => json!(v),
            Cell::Num(v) => json!({ "kind": if *v > 0.0 { "inf" } else { "-inf" } }),
            Cell::Count(v) => json!(v),
            Cell::Bool(v) => json!(v),
            Cell::Rel(r) => serde_json::to_value(r).expect("relative entropy serializes"),
            Cell::Missing => Value::Null,
        }
    }
}

/// Shortest round-tripping form (exponent notation for very small or large
/// magnitudes), with `inf`/`-inf` literals.
pub fn format_f64(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v:?}")
    }
}

pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn render(&self, provenance: &Provenance, format: TableFormat) -> String {
        match format {
            TableFormat::Csv => {
                let mut out = provenance.header();
                out.push_str(&self.columns.join(","));
                out.push('\n');
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(Cell::csv).collect();
                    out.push_str(&cells.join(","));
                    out.push('\n');
                }
                out
            }
            TableFormat::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let obj: Map<String, Value> = self
                            .columns
                            .iter()
                            .zip(row)
                            .map(|(c, cell)| (c.to_string(), cell.json()))
                            .collect();
                        Value::Object(obj)
                    })
                    .collect();
                let doc = json!({ "provenance": provenance.to_json(), "rows": rows });
                let mut s = serde_json::to_string_pretty(&doc).expect("table serializes");
                s.push('\n');
                s
            }
        }
    }
}

/// Writes to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Io {
            path: p.display().to_string(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
