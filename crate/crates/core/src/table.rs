//! CSV and JSON rendering of experiment rows.
//!
//! Numbers are rounded to 15 significant digits and then printed with the
//! shortest representation that round-trips, so output is byte-stable.

use std::fmt::Write as _;
use std::str::FromStr;

use serde_json::{Map, Number, Value};

/// Output encoding for tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn as_str(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format '{other}' (expected csv or json)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

/// A row type with a fixed column layout.
pub trait TableRow {
    fn header() -> &'static [&'static str];
    fn cells(&self) -> Vec<Cell>;
}

/// Rounds to 15 significant digits; `-0` becomes `0`.
pub fn round15(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    let r: f64 = format!("{x:.14e}").parse().expect("valid float text");
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

pub fn format_num(x: f64) -> String {
    format!("{}", round15(x))
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

pub fn to_csv<R: TableRow>(rows: &[R]) -> String {
    let mut out = R::header().join(",");
    out.push('\n');
    for row in rows {
        let line: Vec<String> = row
            .cells()
            .into_iter()
            .map(|c| match c {
                Cell::Num(x) => format_num(x),
                Cell::Text(s) => csv_field(&s),
            })
            .collect();
        let _ = writeln!(out, "{}", line.join(","));
    }
    out
}

pub fn to_json<R: TableRow>(rows: &[R]) -> String {
    let records: Vec<Value> = rows
        .iter()
        .map(|row| {
            let mut obj = Map::new();
            for (key, cell) in R::header().iter().zip(row.cells()) {
                let v = match cell {
                    Cell::Num(x) => Number::from_f64(round15(x)).map_or(Value::Null, Value::Number),
                    Cell::Text(s) => Value::String(s),
                };
                obj.insert((*key).to_owned(), v);
            }
            Value::Object(obj)
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&Value::Array(records)).expect("serializable");
    s.push('\n');
    s
}

pub fn to_table<R: TableRow>(rows: &[R], format: Format) -> String {
    match format {
        Format::Csv => to_csv(rows),
        Format::Json => to_json(rows),
    }
}
