//! Tabular results and their CSV / JSON encodings.

use std::io::{BufRead, Write};

use serde_json::{json, Map, Value};

use crate::error::{CliError, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
}

impl Cell {
    fn to_field(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            // 17 significant digits round-trip every f64
            Cell::Num(x) => format!("{x:.16e}"),
            Cell::Text(s) => s.clone(),
        }
    }

    fn from_field(s: &str) -> Cell {
        if let Ok(i) = s.parse::<i64>() {
            Cell::Int(i)
        } else if let Ok(x) = s.parse::<f64>() {
            Cell::Num(x)
        } else {
            Cell::Text(s.to_string())
        }
    }

    fn to_json(&self) -> Result<Value> {
        Ok(match self {
            Cell::Int(i) => json!(i),
            Cell::Num(x) if !x.is_finite() => {
                return Err(CliError::Format(format!(
                    "non-finite value {x} has no JSON form"
                )))
            }
            Cell::Num(x) => json!(x),
            Cell::Text(s) => json!(s),
        })
    }

    fn from_json(v: &Value) -> Result<Cell> {
        match v {
            Value::Number(n) if n.is_i64() => Ok(Cell::Int(n.as_i64().unwrap())),
            Value::Number(n) => Ok(Cell::Num(n.as_f64().unwrap())),
            Value::String(s) => Ok(Cell::Text(s.clone())),
            other => Err(CliError::Format(format!("unexpected JSON cell {other}"))),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(i) => Some(*i as f64),
            Cell::Num(x) => Some(*x),
            Cell::Text(_) => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub command: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(command: &str, columns: &[&str]) -> Self {
        Table {
            command: command.to_string(),
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn header(&self) -> String {
        format!("# lommel-zeros v{SCHEMA_VERSION} {}", self.command)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{}", self.header())?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::to_field))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: BufRead>(mut input: R) -> Result<Table> {
        let mut first = String::new();
        input.read_line(&mut first)?;
        let prefix = format!("# lommel-zeros v{SCHEMA_VERSION} ");
        let command = first
            .trim_end()
            .strip_prefix(&prefix)
            .ok_or_else(|| CliError::Format(format!("bad header line {:?}", first.trim_end())))?
            .to_string();
        let mut r = csv::Reader::from_reader(input);
        let columns = r.headers()?.iter().map(str::to_string).collect();
        let rows = r
            .records()
            .map(|rec| Ok(rec?.iter().map(Cell::from_field).collect()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Table {
            command,
            columns,
            rows,
        })
    }

    fn row_object(&self, row: &[Cell]) -> Result<Value> {
        let mut m = Map::new();
        for (k, cell) in self.columns.iter().zip(row) {
            m.insert(k.clone(), cell.to_json()?);
        }
        Ok(Value::Object(m))
    }

    /// The JSON envelope. A table marked `scalar` holds exactly one row and
    /// its `data` is that row as an object; otherwise `data` is an array.
    pub fn to_json(&self, params: Value, diagnostics: Value, scalar: bool) -> Result<Value> {
        let data = if scalar && self.rows.len() == 1 {
            self.row_object(&self.rows[0])?
        } else {
            Value::Array(
                self.rows
                    .iter()
                    .map(|r| self.row_object(r))
                    .collect::<Result<_>>()?,
            )
        };
        let mut m = Map::new();
        m.insert("schema_version".into(), json!(SCHEMA_VERSION));
        m.insert("command".into(), json!(self.command));
        m.insert("columns".into(), json!(self.columns));
        m.insert("params".into(), params);
        m.insert("data".into(), data);
        m.insert("diagnostics".into(), diagnostics);
        Ok(Value::Object(m))
    }

    pub fn from_json(v: &Value) -> Result<Table> {
        let bad = |m: &str| CliError::Format(m.to_string());
        if v["schema_version"] != json!(SCHEMA_VERSION) {
            return Err(bad("unsupported schema_version"));
        }
        let command = v["command"]
            .as_str()
            .ok_or_else(|| bad("missing command"))?
            .to_string();
        let columns: Vec<String> = v["columns"]
            .as_array()
            .ok_or_else(|| bad("missing columns"))?
            .iter()
            .map(|c| {
                c.as_str()
                    .map(str::to_string)
                    .ok_or_else(|| bad("column name"))
            })
            .collect::<Result<_>>()?;
        let objects: Vec<&Value> = match &v["data"] {
            Value::Array(a) => a.iter().collect(),
            o @ Value::Object(_) => vec![o],
            _ => return Err(bad("data must be an array or object")),
        };
        let rows = objects
            .into_iter()
            .map(|o| {
                columns
                    .iter()
                    .map(|c| Cell::from_json(o.get(c).ok_or_else(|| bad("missing cell"))?))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        Ok(Table {
            command,
            columns,
            rows,
        })
    }
}
