//! Tabular results written as CSV or JSON.
//!
//! JSON output is one document `{schema_version, command, metadata, rows}`.
//! CSV output carries only the table; its metadata (with the same
//! `schema_version`) goes to `<output>.meta.json`, or to standard error as a
//! single JSON line when writing to standard output.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use crate::args::Format;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    fn csv_field(&self) -> String {
        match self {
            // Locale-free, round-trips, and switches to exponent form at the
            // extremes.
            Cell::Num(v) => format!("{v:?}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) if v.is_finite() => json!(v),
            Cell::Num(v) if *v == f64::INFINITY => json!("inf"),
            Cell::Num(v) if *v == f64::NEG_INFINITY => json!("-inf"),
            Cell::Num(_) => Value::Null,
            Cell::Int(v) => json!(v),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub command: &'static str,
    pub metadata: Map<String, Value>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Report {
    pub fn new(command: &'static str, columns: &[&str]) -> Self {
        Report {
            command,
            metadata: Map::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: Value) {
        self.metadata.insert(key.to_string(), value);
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn header(&self) -> Value {
        let mut m = Map::new();
        m.insert("schema_version".into(), json!(SCHEMA_VERSION));
        m.insert("command".into(), json!(self.command));
        m.insert("tool_version".into(), json!(env!("CARGO_PKG_VERSION")));
        m.insert("columns".into(), json!(self.columns));
        m.insert("metadata".into(), Value::Object(self.metadata.clone()));
        Value::Object(m)
    }

    pub fn to_json(&self) -> Value {
        let mut doc = self.header();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Object(self.columns.iter().zip(r).map(|(c, v)| (c.clone(), v.json())).collect()))
            .collect();
        doc["rows"] = Value::Array(rows);
        doc
    }

    pub fn write_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(&self.columns)?;
        for r in &self.rows {
            wr.write_record(r.iter().map(Cell::csv_field))?;
        }
        wr.flush()?;
        Ok(())
    }
}

pub fn sidecar_path(output: &Path) -> PathBuf {
    let mut s = output.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

pub fn emit(report: &Report, format: Format, output: Option<&Path>) -> std::io::Result<()> {
    match (format, output) {
        (Format::Json, Some(p)) => {
            let mut f = std::fs::File::create(p)?;
            serde_json::to_writer_pretty(&mut f, &report.to_json())?;
            writeln!(f)
        }
        (Format::Json, None) => {
            let mut out = std::io::stdout().lock();
            serde_json::to_writer_pretty(&mut out, &report.to_json())?;
            writeln!(out)
        }
        (Format::Csv, Some(p)) => {
            report
                .write_csv(std::fs::File::create(p)?)
                .map_err(std::io::Error::other)?;
            let mut f = std::fs::File::create(sidecar_path(p))?;
            serde_json::to_writer_pretty(&mut f, &report.header())?;
            writeln!(f)
        }
        (Format::Csv, None) => {
            report
                .write_csv(std::io::stdout().lock())
                .map_err(std::io::Error::other)?;
            eprintln!("{}", report.header());
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new("density", &["lambda", "rho", "note"]);
        r.meta("seed", json!(7));
        r.push(vec![0.0.into(), f64::INFINITY.into(), "a,b".to_string().into()]);
        r.push(vec![0.5.into(), 0.25.into(), Cell::Empty]);
        r
    }

    #[test]
    fn csv_quotes_and_formats() {
        let mut buf = Vec::new();
        sample().write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "lambda,rho,note\n0.0,inf,\"a,b\"\n0.5,0.25,\n");
        let mut r = Report::new("x", &["v"]);
        r.push(vec![3.5e-14.into()]);
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "v\n3.5e-14\n");
    }

    #[test]
    fn json_carries_schema_and_rows() {
        let v = sample().to_json();
        assert_eq!(v["schema_version"], json!(SCHEMA_VERSION));
        assert_eq!(v["metadata"]["seed"], json!(7));
        assert_eq!(v["rows"][0]["rho"], json!("inf"));
        assert_eq!(v["rows"][1]["rho"], json!(0.25));
        assert_eq!(v["rows"][1]["note"], Value::Null);
    }

    #[test]
    fn sidecar_name() {
        assert_eq!(
            sidecar_path(Path::new("/tmp/x.csv")),
            PathBuf::from("/tmp/x.csv.meta.json")
        );
    }
}
