//! Tables written as CSV or JSON. Floats carry 17 significant digits so a reread is bit-exact.

use std::io::Write;
use std::path::Path;

use serde_json::{Map, Value};

use crate::{CliError, Format};

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Text(String),
}

impl Cell {
    pub fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format!("{v:.16e}"),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            // non-finite floats have no JSON number form
            Cell::Float(v) if !v.is_finite() => Value::String(v.to_string()),
            Cell::Float(_) => Value::Number(self.render().parse().expect("finite float is a JSON number")),
            Cell::Text(s) => Value::String(s.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Table {
        Table { header, rows: Vec::new() }
    }

    pub fn csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn json(&self) -> Value {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self.header.iter().zip(row).map(|(k, c)| (k.to_string(), c.json())).collect();
                Value::Object(obj)
            })
            .collect();
        Value::Array(rows)
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Csv => self.csv(),
            Format::Json => Ok(format!("{}\n", serde_json::to_string_pretty(&self.json()).expect("json values serialise"))),
        }
    }
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Io(std::io::Error::other(e))
}

/// Writes to `path`, or to stdout when absent.
pub fn emit(text: &str, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_reread_exactly() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE, f64::MAX] {
            let s = Cell::Float(v).render();
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits(), "{s}");
        }
    }

    #[test]
    fn json_numbers_keep_digits() {
        let mut t = Table::new(vec!["m", "x"]);
        t.rows.push(vec![Cell::Int(8), Cell::Float(0.1 + 0.2)]);
        let v = t.json();
        assert_eq!(v[0]["m"], 8);
        assert_eq!(v[0]["x"].as_f64().unwrap(), 0.1 + 0.2);
        let nan = Table { header: vec!["x"], rows: vec![vec![Cell::Float(f64::NAN)]] };
        assert_eq!(nan.json()[0]["x"], "NaN");
    }

    #[test]
    fn csv_quotes_text() {
        let t = Table { header: vec!["name"], rows: vec![vec![Cell::Text("a, b".into())]] };
        assert_eq!(t.csv().unwrap(), "name\n\"a, b\"\n");
    }
}
