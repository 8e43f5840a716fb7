//! Tabular output in CSV or JSON, plus the file/stdout sink.
//!
//! CSV rows print floats with nine significant digits (`{:.8e}`); non-finite
//! values appear literally as `NaN` / `inf`, which `f64::from_str` parses
//! back. JSON is a pretty-printed array of row objects; non-finite floats
//! have no JSON number representation and become `null`. Both writers are
//! deterministic: identical tables serialize to identical bytes.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use clap::ValueEnum;
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutFormat {
    Csv,
    Json,
}

/// Nine-significant-digit float rendering used in every CSV cell.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.8e}")
}

#[derive(Debug, Clone)]
pub enum Cell {
    Float(f64),
    Text(String),
}

impl Cell {
    fn to_csv(&self) -> String {
        match self {
            Cell::Float(x) => fmt_float(*x),
            Cell::Text(s) => s.clone(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Float(x) => serde_json::Number::from_f64(*x)
                .map(Value::Number)
                .unwrap_or(Value::Null),
            Cell::Text(s) => json!(s),
        }
    }
}

/// A rectangular result table with named columns.
#[derive(Debug, Clone)]
pub struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_csv(&self, w: &mut dyn Write) -> io::Result<()> {
        writeln!(w, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::to_csv).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    Value::Object(
                        self.columns
                            .iter()
                            .zip(row)
                            .map(|(c, cell)| (c.to_string(), cell.to_json()))
                            .collect(),
                    )
                })
                .collect(),
        )
    }

    pub fn write(&self, w: &mut dyn Write, format: OutFormat) -> io::Result<()> {
        match format {
            OutFormat::Csv => self.write_csv(w),
            OutFormat::Json => write_json(w, &self.to_json()),
        }
    }
}

/// Pretty-print JSON with a trailing newline.
pub fn write_json(w: &mut dyn Write, value: &Value) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *w, value)?;
    writeln!(w)
}

/// Run `body` against `--out PATH` or stdout; create/flush errors map to
/// exit 3, which is why the sink owns the error conversion.
pub fn write_to(
    out: Option<&Path>,
    body: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> CliResult<()> {
    match out {
        Some(path) => {
            let file = File::create(path).map_err(|e| CliError::io_at(path, e))?;
            let mut w = BufWriter::new(file);
            body(&mut w).map_err(|e| CliError::io_at(path, e))?;
            w.flush().map_err(|e| CliError::io_at(path, e))
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            match body(&mut w).and_then(|()| w.flush()) {
                Ok(()) => Ok(()),
                // Reader closed the pipe (e.g. `tpi ... | head`): not an error.
                Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
                Err(e) => Err(CliError::Io(format!("stdout: {e}"))),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_print_nine_significant_digits() {
        assert_eq!(fmt_float(0.515), "5.15000000e-1");
        assert_eq!(fmt_float(0.0), "0.00000000e0");
        assert_eq!(fmt_float(-2.5e-12), "-2.50000000e-12");
        assert_eq!(fmt_float(f64::INFINITY), "inf");
        assert_eq!(fmt_float(f64::NAN), "NaN");
        assert_eq!("NaN".parse::<f64>().ok().map(|x| x.is_nan()), Some(true));
        assert_eq!("inf".parse::<f64>(), Ok(f64::INFINITY));
    }

    #[test]
    fn csv_layout_is_header_plus_rows() {
        let mut t = Table::new(&["tau_s", "g2", "kind"]);
        t.push(vec![
            Cell::Float(0.0),
            Cell::Float(0.515),
            Cell::Text("dip".into()),
        ]);
        t.push(vec![
            Cell::Float(1e-9),
            Cell::Float(0.5),
            Cell::Text("x".into()),
        ]);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "tau_s,g2,kind\n0.00000000e0,5.15000000e-1,dip\n1.00000000e-9,5.00000000e-1,x\n"
        );
    }

    #[test]
    fn json_rows_are_objects_and_nonfinite_becomes_null() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![Cell::Float(1.5), Cell::Float(f64::NAN)]);
        let v = t.to_json();
        assert_eq!(v[0]["a"], json!(1.5));
        assert_eq!(v[0]["b"], Value::Null);
    }

    #[test]
    fn identical_tables_serialize_identically() {
        let build = || {
            let mut t = Table::new(&["x", "y"]);
            t.push(vec![Cell::Float(0.1 + 0.2), Cell::Text("seven".into())]);
            t
        };
        for format in [OutFormat::Csv, OutFormat::Json] {
            let (mut b1, mut b2) = (Vec::new(), Vec::new());
            build().write(&mut b1, format).unwrap();
            build().write(&mut b2, format).unwrap();
            assert_eq!(b1, b2);
        }
    }
}
