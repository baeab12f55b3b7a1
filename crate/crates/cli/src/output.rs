use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use clap::ValueEnum;
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Rows of named cells; `Null` cells print as empty CSV fields.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: impl IntoIterator<Item = impl Into<String>>) -> Self {
        Table { columns: columns.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| Value::Object(self.columns.iter().cloned().zip(row.iter().cloned()).collect()))
                .collect(),
        )
    }
}

/// What a command produced, renderable in either format.
pub enum Output {
    /// A single flat record: a JSON object, or a one-row CSV.
    Record(Map<String, Value>),
    /// A JSON array of row objects, or a CSV with header.
    Table(Table),
    /// A nested JSON document whose CSV rendering is `table`.
    Report { json: Value, table: Table },
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn write_csv<W: Write>(out: W, table: &Table) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row.iter().map(cell))?;
    }
    w.flush()
}

impl Output {
    pub fn render<W: Write>(&self, format: Format, mut out: W) -> io::Result<()> {
        match (self, format) {
            (Output::Record(m), Format::Json) => writeln!(out, "{}", pretty(&Value::Object(m.clone()))),
            (Output::Table(t), Format::Json) => writeln!(out, "{}", pretty(&t.to_json())),
            (Output::Report { json, .. }, Format::Json) => writeln!(out, "{}", pretty(json)),
            (Output::Record(m), Format::Csv) => {
                let mut t = Table::new(m.keys().cloned());
                t.push(m.values().cloned().collect());
                write_csv(out, &t)
            }
            (Output::Table(t) | Output::Report { table: t, .. }, Format::Csv) => write_csv(out, t),
        }
    }

    pub fn emit(&self, format: Format, path: Option<&Path>) -> io::Result<()> {
        match path {
            Some(p) => {
                let mut f = io::BufWriter::new(File::create(p)?);
                self.render(format, &mut f)?;
                f.flush()
            }
            None => self.render(format, io::stdout().lock()),
        }
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values always serialize")
}

/// `Some(x)` as a number, `None` (or a non-finite value) as null.
pub fn num(x: Option<f64>) -> Value {
    x.and_then(serde_json::Number::from_f64).map_or(Value::Null, Value::Number)
}
