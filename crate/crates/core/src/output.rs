//! Tabular output in CSV or JSON.

use std::io::{self, Write};

use serde::Serialize;

use crate::config::Format;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Bool(bool),
    Text(String),
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

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
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

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub command: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(command: &str, columns: &[&'static str]) -> Self {
        Self { command: command.to_string(), columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn write<W: Write>(&self, out: &mut W, format: Format, precision: usize) -> io::Result<()> {
        match format {
            Format::Csv => self.write_csv(out, precision),
            Format::Json => self.write_json(out),
        }
    }

    pub fn to_bytes(&self, format: Format, precision: usize) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write(&mut buf, format, precision).expect("writing to memory");
        buf
    }

    fn write_csv<W: Write>(&self, out: &mut W, precision: usize) -> io::Result<()> {
        writeln!(out, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let fields: Vec<String> = row.iter().map(|c| csv_field(c, precision)).collect();
            out.write_all(fields.join(",").as_bytes())?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    fn write_json<W: Write>(&self, out: &mut W) -> io::Result<()> {
        #[derive(Serialize)]
        struct Doc<'a> {
            command: &'a str,
            columns: &'a [&'static str],
            rows: Vec<Vec<serde_json::Value>>,
        }
        let rows = self.rows.iter().map(|r| r.iter().map(json_value).collect()).collect();
        let doc = Doc { command: &self.command, columns: &self.columns, rows };
        serde_json::to_writer_pretty(&mut *out, &doc)?;
        out.write_all(b"\n")
    }
}

/// Scientific notation with `precision` mantissa decimals; `nan`/`inf` spelled out.
pub fn format_number(v: f64, precision: usize) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        // adding zero folds -0 into 0
        format!("{:.*e}", precision, v + 0.0)
    }
}

fn csv_field(c: &Cell, precision: usize) -> String {
    match c {
        Cell::Num(v) => format_number(*v, precision),
        Cell::Int(v) => v.to_string(),
        Cell::Bool(b) => b.to_string(),
        Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Cell::Text(s) => s.clone(),
    }
}

fn json_value(c: &Cell) -> serde_json::Value {
    match c {
        Cell::Num(v) => serde_json::Number::from_f64(*v).map_or(serde_json::Value::Null, serde_json::Value::Number),
        Cell::Int(v) => (*v).into(),
        Cell::Bool(b) => (*b).into(),
        Cell::Text(s) => s.clone().into(),
    }
}
