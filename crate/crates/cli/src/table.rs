use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Complex([f64; 2]),
    Text(String),
    Empty(Option<()>),
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v + 0.0)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<Complex64> for Cell {
    fn from(v: Complex64) -> Self {
        Cell::Complex([v.re + 0.0, v.im + 0.0])
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty(None), Cell::from)
    }
}

/// Long-format table; complex columns hold [re, im] pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub schema: String,
    pub columns: Vec<String>,
    /// Columns holding complex values (split into `_re`/`_im` in CSV).
    pub complex: Vec<bool>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(command: &str, columns: &[(&str, bool)]) -> Self {
        Table {
            schema: format!("jacobi-scatter/{command}/v{SCHEMA_VERSION}"),
            columns: columns.iter().map(|(c, _)| c.to_string()).collect(),
            complex: columns.iter().map(|&(_, z)| z).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_csv(&self, out: impl Write) -> csv::Result<()> {
        let mut out = out;
        writeln!(out, "# schema: {}", self.schema)?;
        let mut w = csv::Writer::from_writer(out);
        let mut header = Vec::new();
        for (name, &z) in self.columns.iter().zip(&self.complex) {
            if z {
                header.push(format!("{name}_re"));
                header.push(format!("{name}_im"));
            } else {
                header.push(name.clone());
            }
        }
        w.write_record(&header)?;
        for row in &self.rows {
            let mut rec = Vec::with_capacity(header.len());
            for (cell, &z) in row.iter().zip(&self.complex) {
                match cell {
                    Cell::Int(v) => rec.push(v.to_string()),
                    Cell::Real(v) => rec.push(format!("{v:?}")),
                    Cell::Complex([re, im]) => {
                        rec.push(format!("{re:?}"));
                        rec.push(format!("{im:?}"));
                    }
                    Cell::Text(s) => rec.push(s.clone()),
                    Cell::Empty(_) => {
                        rec.push(String::new());
                        if z {
                            rec.push(String::new());
                        }
                    }
                }
            }
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_json(&self, mut out: impl Write) -> std::io::Result<()> {
        serde_json::to_writer_pretty(&mut out, self)?;
        writeln!(out)
    }
}
