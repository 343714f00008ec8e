//! The report every subcommand writes, as JSON or as CSV rows.

use std::collections::BTreeSet;
use std::io::Write;

use qgap_core::report::CheckReport;
use serde::Serialize;
use serde_json::{Map, Value};

/// Bumped whenever a field changes meaning or disappears.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct ErrorInfo {
    pub kind: &'static str,
    pub message: String,
}

/// Deterministic for a fixed configuration: no timings, no host details.
#[derive(Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub config: Value,
    pub params: Value,
    pub rows: Vec<Value>,
    pub checks: Vec<CheckReport>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorInfo>,
}

impl Report {
    pub fn new(command: &str, config: Value) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            config,
            params: Value::Object(Map::new()),
            rows: Vec::new(),
            checks: Vec::new(),
            pass: true,
            error: None,
        }
    }

    /// Recomputes `pass` from the checks and row `pass` flags.
    pub fn settle(&mut self) {
        let rows_ok = self
            .rows
            .iter()
            .all(|r| r.get("pass").and_then(Value::as_bool).unwrap_or(true));
        self.pass = self.error.is_none() && rows_ok && self.checks.iter().all(CheckReport::passed);
    }

    pub fn to_json(&self) -> serde_json::Result<Vec<u8>> {
        let mut out = serde_json::to_vec_pretty(self)?;
        out.push(b'\n');
        Ok(out)
    }

    /// One CSV line per row. Columns are the union of row keys in
    /// lexicographic order; a row lacking a column leaves it empty, and
    /// nested values are written as compact JSON.
    pub fn to_csv(&self) -> csv::Result<Vec<u8>> {
        let columns: BTreeSet<&str> = self
            .rows
            .iter()
            .filter_map(Value::as_object)
            .flat_map(|o| o.keys().map(String::as_str))
            .collect();
        if columns.is_empty() {
            return Ok(Vec::new());
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&columns)?;
        for row in &self.rows {
            let rec = columns.iter().map(|c| match row.get(*c) {
                None | Some(Value::Null) => String::new(),
                Some(Value::String(s)) => s.clone(),
                Some(v) => v.to_string(),
            });
            w.write_record(rec)?;
        }
        w.flush()?;
        Ok(w.into_inner().map_err(|e| e.into_error())?)
    }
}

pub fn write_bytes(out: Option<&std::path::Path>, bytes: &[u8]) -> std::io::Result<()> {
    match out {
        Some(p) => std::fs::write(p, bytes),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn csv_header_covers_every_key() {
        let mut r = Report::new("x", json!({}));
        r.rows = vec![json!({"b": 1, "a": "s"}), json!({"c": [1, 2], "a": null})];
        let text = String::from_utf8(r.to_csv().unwrap()).unwrap();
        assert_eq!(text, "a,b,c\ns,1,\n,,\"[1,2]\"\n");
    }

    #[test]
    fn failing_row_fails_report() {
        let mut r = Report::new("x", json!({}));
        r.rows = vec![json!({"pass": true}), json!({"pass": false})];
        r.settle();
        assert!(!r.pass);
    }
}
