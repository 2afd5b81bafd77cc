use std::io::{self, Write};

use serde_json::Value;

use crate::Format;

/// A command result in all three output formats, plus its exit status.
pub struct Output {
    pub text: String,
    pub json: Value,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub code: u8,
}

impl Output {
    pub fn new(text: String, json: Value) -> Self {
        Output {
            text,
            json,
            header: Vec::new(),
            rows: Vec::new(),
            code: 0,
        }
    }

    pub fn csv(mut self, header: Vec<&'static str>, rows: Vec<Vec<String>>) -> Self {
        self.header = header;
        self.rows = rows;
        self
    }

    pub fn code(mut self, code: u8) -> Self {
        self.code = code;
        self
    }

    pub fn emit(&self, format: Format) -> io::Result<()> {
        let stdout = io::stdout();
        let mut out = stdout.lock();
        match format {
            Format::Text => {
                out.write_all(self.text.as_bytes())?;
                if !self.text.ends_with('\n') {
                    writeln!(out)?;
                }
            }
            Format::Json => {
                serde_json::to_writer_pretty(&mut out, &self.json)?;
                writeln!(out)?;
            }
            Format::Csv => write_csv(&mut out, &self.header, &self.rows)?,
        }
        out.flush()
    }
}

pub fn write_csv(out: impl Write, header: &[&str], rows: &[Vec<String>]) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()
}

/// Compact single-line JSON, for embedding structured values in CSV cells.
pub fn compact(v: &impl serde::Serialize) -> String {
    serde_json::to_string(v).expect("value serializes")
}
