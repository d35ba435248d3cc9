//! Column-oriented results with a metadata block, written as CSV (metadata
//! on leading `#` lines) or JSON `{meta, columns, rows}`.

use std::fs;
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::error::{CliError, CliResult};

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

/// 17 significant digits: enough to round-trip any double.
pub fn format_number(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v:.16e}")
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(v) => format_number(*v),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) if v.is_finite() => json!(v),
            Cell::Num(_) => Value::Null,
            Cell::Text(s) => json!(s),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(v) => Some(*v),
            Cell::Text(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultTable {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl ResultTable {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            meta: Vec::new(),
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        self.meta.push((key.into(), value.to_string()));
        self
    }

    pub fn meta_num(&mut self, key: impl Into<String>, value: f64) -> &mut Self {
        self.meta.push((key.into(), format_number(value)));
        self
    }

    pub fn meta_value(&self, key: &str) -> Option<&str> {
        self.meta
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn push(&mut self, row: Vec<Cell>) -> CliResult<()> {
        if row.len() != self.columns.len() {
            return Err(CliError::Numeric(format!(
                "row has {} cells but the table has {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn push_numbers(&mut self, row: &[f64]) -> CliResult<()> {
        self.push(row.iter().map(|&v| Cell::Num(v)).collect())
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column_index(name)?;
        Some(
            self.rows
                .iter()
                .map(|r| r[i].as_f64().unwrap_or(f64::NAN))
                .collect(),
        )
    }

    pub fn to_csv(&self) -> CliResult<String> {
        let mut out = String::new();
        for (k, v) in &self.meta {
            // keep each metadata entry on one comment line
            out.push_str(&format!("# {k}: {}\n", v.replace('\n', " ")));
        }
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.columns).map_err(io)?;
        for r in &self.rows {
            w.write_record(r.iter().map(Cell::render)).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        out.push_str(&String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))?);
        Ok(out)
    }

    /// Inverse of [`to_csv`]; cells that parse as numbers become [`Cell::Num`].
    pub fn from_csv(text: &str) -> CliResult<Self> {
        let mut meta = Vec::new();
        let mut body = String::new();
        let mut in_meta = true;
        for line in text.split_inclusive('\n') {
            if in_meta {
                if let Some(rest) = line.strip_prefix("# ") {
                    let rest = rest.trim_end_matches('\n');
                    let (k, v) = rest.split_once(": ").unwrap_or((rest, ""));
                    meta.push((k.to_string(), v.to_string()));
                    continue;
                }
                in_meta = false;
            }
            body.push_str(line);
        }
        let mut r = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(body.as_bytes());
        let columns = r
            .headers()
            .map_err(io)?
            .iter()
            .map(str::to_string)
            .collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(io)?;
            rows.push(
                rec.iter()
                    .map(|s| {
                        s.parse::<f64>()
                            .map(Cell::Num)
                            .unwrap_or_else(|_| Cell::Text(s.to_string()))
                    })
                    .collect(),
            );
        }
        Ok(Self {
            meta,
            columns,
            rows,
        })
    }

    pub fn to_json(&self) -> CliResult<String> {
        let meta: Map<String, Value> = self
            .meta
            .iter()
            .map(|(k, v)| (k.clone(), json!(v)))
            .collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
            .collect();
        let doc = json!({ "meta": meta, "columns": self.columns, "rows": rows });
        serde_json::to_string_pretty(&doc).map_err(|e| CliError::Io(e.to_string()))
    }

    pub fn write_csv(&self, path: &Path) -> CliResult<()> {
        write_file(path, &self.to_csv()?)
    }

    pub fn write_json(&self, path: &Path) -> CliResult<()> {
        write_file(path, &self.to_json()?)
    }
}

fn io(e: csv::Error) -> CliError {
    CliError::Io(e.to_string())
}

pub fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
