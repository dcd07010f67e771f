//! Tables and their CSV / JSON encodings.

use std::io::Write;

use serde_json::{json, Value};

use crate::config::Format;
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<String>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn numeric_column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column_index(name)?;
        self.rows
            .iter()
            .map(|r| match r[i] {
                Cell::Num(v) => Some(v),
                Cell::Text(_) => None,
            })
            .collect()
    }

    /// Every row has one cell per column and every number is finite.
    pub fn check(&self) -> Result<(), CliError> {
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != self.columns.len() {
                return Err(CliError::Validation(format!(
                    "row {i} has {} cells for {} columns",
                    row.len(),
                    self.columns.len()
                )));
            }
            for (cell, name) in row.iter().zip(&self.columns) {
                if let Cell::Num(v) = cell {
                    if !v.is_finite() {
                        return Err(CliError::Validation(format!(
                            "non-finite value {v} in row {i}, column `{name}`"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn write(&self, format: Format, scenario: &str, out: &mut dyn Write) -> Result<(), CliError> {
        self.check()?;
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => self.write_json(scenario, out),
        }
        .map_err(|e| CliError::Config(format!("write failed: {e}")))
    }

    fn write_csv(&self, out: &mut dyn Write) -> std::io::Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| match c {
                Cell::Num(v) => format_number(*v),
                Cell::Text(s) => s.clone(),
            }))?;
        }
        w.flush()
    }

    fn write_json(&self, scenario: &str, out: &mut dyn Write) -> std::io::Result<()> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                Value::Array(
                    r.iter()
                        .map(|c| match c {
                            Cell::Num(v) => json!(v),
                            Cell::Text(s) => json!(s),
                        })
                        .collect(),
                )
            })
            .collect();
        let doc = json!({
            "scenario": scenario,
            "columns": self.columns,
            "rows": rows,
        });
        serde_json::to_writer_pretty(&mut *out, &doc)?;
        out.write_all(b"\n")
    }
}

/// Shortest round-trip decimal; scientific notation outside `[1e-4, 1e15)`.
pub fn format_number(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    let a = v.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}
