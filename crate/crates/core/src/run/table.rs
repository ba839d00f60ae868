//! Rectangular result tables with `#` metadata, written as CSV or JSON.

use std::io::{BufRead, Write};

use serde_json::{json, Value};

use super::Format;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Absent,
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            _ => None,
        }
    }

    /// Non-finite numbers are stored as absent.
    pub fn num(x: f64) -> Self {
        if x.is_finite() {
            Cell::Num(x)
        } else {
            Cell::Absent
        }
    }

    pub fn opt(x: Option<f64>) -> Self {
        x.map_or(Cell::Absent, Cell::num)
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

/// Shortest decimal string that parses back to the same `f64`.
pub fn format_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ResultTable {
    pub metadata: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl ResultTable {
    pub fn new(columns: &[&str]) -> Self {
        Self { metadata: Vec::new(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push_meta(&mut self, key: &str, value: impl Into<String>) {
        self.metadata.push((key.to_string(), value.into()));
    }

    pub fn push_row(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::ShapeMismatch { left: row.len(), right: self.columns.len() });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric values of a column (absent and text cells are skipped).
    pub fn values(&self, name: &str) -> Vec<f64> {
        match self.column(name) {
            Some(i) => self.rows.iter().filter_map(|r| r[i].as_f64()).collect(),
            None => Vec::new(),
        }
    }

    /// Rows whose `status` cell is anything but `ok`.
    pub fn failed_rows(&self) -> usize {
        match self.column("status") {
            Some(i) => self.rows.iter().filter(|r| !matches!(&r[i], Cell::Text(s) if s == "ok")).count(),
            None => 0,
        }
    }

    pub fn write<W: Write>(&self, format: Format, out: W) -> Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => self.write_json(out),
        }
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        for (k, v) in &self.metadata {
            writeln!(out, "# {k}: {v}")?;
        }
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| match c {
                Cell::Num(x) => format_f64(*x),
                Cell::Text(s) => s.clone(),
                Cell::Absent => String::new(),
            }))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn read_csv<R: BufRead>(mut input: R) -> Result<Self> {
        let mut metadata = Vec::new();
        let mut body = String::new();
        let mut line = String::new();
        loop {
            line.clear();
            if input.read_line(&mut line)? == 0 {
                break;
            }
            if let Some(rest) = line.strip_prefix("# ") {
                let rest = rest.trim_end_matches('\n');
                let (k, v) =
                    rest.split_once(": ").ok_or_else(|| Error::Config(format!("bad metadata line {rest:?}")))?;
                metadata.push((k.to_string(), v.to_string()));
            } else {
                body.push_str(&line);
                input.read_to_string(&mut body)?;
                break;
            }
        }
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(body.as_bytes());
        let columns: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            rows.push(
                rec.iter()
                    .map(|s| {
                        if s.is_empty() {
                            Cell::Absent
                        } else if let Some(x) = s.parse::<f64>().ok().filter(|x| x.is_finite()) {
                            Cell::Num(x)
                        } else {
                            Cell::Text(s.to_string())
                        }
                    })
                    .collect(),
            );
        }
        Ok(Self { metadata, columns, rows })
    }

    pub fn to_json(&self) -> Value {
        let meta: serde_json::Map<String, Value> =
            self.metadata.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                Value::Array(
                    r.iter()
                        .map(|c| match c {
                            Cell::Num(x) => json!(x),
                            Cell::Text(s) => json!(s),
                            Cell::Absent => Value::Null,
                        })
                        .collect(),
                )
            })
            .collect();
        json!({ "metadata": meta, "columns": self.columns, "rows": rows })
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut out, &self.to_json())?;
        writeln!(out)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ResultTable {
        let mut t = ResultTable::new(&["x", "q", "status"]);
        t.push_meta("tool", "test 1");
        t.push_row(vec![Cell::Num(0.1), Cell::Num(-0.25), "ok".into()]).unwrap();
        t.push_row(vec![Cell::Num(1e-7), Cell::Absent, "zero likelihood, weight 0".into()]).unwrap();
        t.push_row(vec![Cell::Num(1.0 / 3.0), Cell::Num(6.02e23), Cell::Absent]).unwrap();
        t
    }

    #[test]
    fn shortest_round_trip_formatting() {
        for x in [0.1, 1.0 / 3.0, 1e-7, -2.5e-300, 6.02e23, 12345.678, 0.0, -0.0001] {
            let s = format_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(format_f64(0.25), "0.25");
        assert_eq!(format_f64(1e-7), "1e-7");
    }

    #[test]
    fn csv_round_trip() {
        let t = sample();
        let s = t.to_csv_string().unwrap();
        assert!(s.starts_with("# tool: test 1\nx,q,status\n"));
        assert!(!s.contains('\r'));
        let back = ResultTable::read_csv(s.as_bytes()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn ragged_rows_are_rejected() {
        let mut t = ResultTable::new(&["a", "b"]);
        assert!(t.push_row(vec![Cell::Num(1.0)]).is_err());
    }

    #[test]
    fn json_shape() {
        let v = sample().to_json();
        assert_eq!(v["columns"][1], "q");
        assert!(v["rows"][1][1].is_null());
        assert_eq!(v["rows"][0][1], -0.25);
    }
}
