use std::io::{self, Write};

use super::args::Format;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(usize),
    Bool(bool),
    Text(String),
    /// Empty in CSV, `null` in JSON.
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        Cell::Num(v.unwrap_or(f64::NAN))
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v)
    }
}

/// Twelve significant digits; anything non-finite is the literal `nan`.
pub fn fmt_num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.11e}")
    } else {
        "nan".to_string()
    }
}

#[derive(Clone, Debug, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(columns: &[S]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.as_ref().to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> io::Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => self.write_json(out),
        }
    }

    fn write_csv(&self, out: &mut dyn Write) -> io::Result<()> {
        writeln!(
            out,
            "{}",
            self.columns
                .iter()
                .map(|c| csv_field(c))
                .collect::<Vec<_>>()
                .join(",")
        )?;
        for row in &self.rows {
            let fields: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Num(v) => fmt_num(*v),
                    Cell::Int(v) => v.to_string(),
                    Cell::Bool(b) => b.to_string(),
                    Cell::Text(s) => csv_field(s),
                    Cell::Empty => String::new(),
                })
                .collect();
            writeln!(out, "{}", fields.join(","))?;
        }
        Ok(())
    }

    fn write_json(&self, out: &mut dyn Write) -> io::Result<()> {
        let keys: Vec<String> = self.columns.iter().map(|c| json_string(c)).collect();
        writeln!(out, "[")?;
        for (i, row) in self.rows.iter().enumerate() {
            let fields: Vec<String> = keys
                .iter()
                .zip(row)
                .map(|(k, c)| {
                    let v = match c {
                        Cell::Num(v) if v.is_finite() => fmt_num(*v),
                        Cell::Num(_) => "\"nan\"".to_string(),
                        Cell::Int(v) => v.to_string(),
                        Cell::Bool(b) => b.to_string(),
                        Cell::Text(s) => json_string(s),
                        Cell::Empty => "null".to_string(),
                    };
                    format!("{k}:{v}")
                })
                .collect();
            let sep = if i + 1 < self.rows.len() { "," } else { "" };
            writeln!(out, "  {{{}}}{sep}", fields.join(","))?;
        }
        writeln!(out, "]")
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn json_string(s: &str) -> String {
    serde_json::to_string(s).expect("string serialization cannot fail")
}
