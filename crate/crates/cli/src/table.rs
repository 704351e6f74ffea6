//! CSV output: one header row, data rows, then optional `#` comment rows.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

/// Round-trippable scientific notation with 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct CsvWriter {
    out: BufWriter<File>,
    columns: usize,
    in_footer: bool,
}

impl CsvWriter {
    pub fn create(path: &Path, header: &[&str]) -> io::Result<Self> {
        let mut out = BufWriter::new(File::create(path)?);
        writeln!(out, "{}", header.join(","))?;
        Ok(Self {
            out,
            columns: header.len(),
            in_footer: false,
        })
    }

    pub fn row<S: AsRef<str>>(&mut self, fields: &[S]) -> io::Result<()> {
        assert!(!self.in_footer, "data row after a comment row");
        assert_eq!(fields.len(), self.columns, "row width differs from header");
        let line: Vec<&str> = fields.iter().map(AsRef::as_ref).collect();
        writeln!(self.out, "{}", line.join(","))
    }

    pub fn comment(&mut self, text: &str) -> io::Result<()> {
        self.in_footer = true;
        writeln!(self.out, "# {text}")
    }

    pub fn finish(mut self) -> io::Result<()> {
        self.out.flush()
    }
}
