//! Plain-text artifact formatting shared by the CSV and JSON writers.
//!
//! Floats are rendered with 17 significant digits in scientific notation,
//! `.` as decimal separator and LF line endings, so identical inputs give
//! byte-identical files.

use std::io::{self, Write};

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Small CSV writer: optional `# key: value` preamble, mandatory header,
/// rows, and `# ...` footer lines.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    preamble: Vec<String>,
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
    footer: Vec<String>,
}

impl CsvTable {
    pub fn new(header: &[&'static str]) -> Self {
        CsvTable { preamble: Vec::new(), header: header.to_vec(), rows: Vec::new(), footer: Vec::new() }
    }

    pub fn comment(&mut self, line: impl Into<String>) -> &mut Self {
        self.preamble.push(line.into());
        self
    }

    pub fn footer(&mut self, line: impl Into<String>) -> &mut Self {
        self.footer.push(line.into());
        self
    }

    pub fn row(&mut self, cells: Vec<String>) -> &mut Self {
        assert_eq!(cells.len(), self.header.len(), "row width must match header");
        self.rows.push(cells);
        self
    }

    pub fn header(&self) -> &[&'static str] {
        &self.header
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> io::Result<()> {
        for line in &self.preamble {
            writeln!(w, "# {line}")?;
        }
        writeln!(w, "{}", self.header.join(","))?;
        for row in &self.rows {
            writeln!(w, "{}", row.join(","))?;
        }
        for line in &self.footer {
            writeln!(w, "# {line}")?;
        }
        Ok(())
    }

    pub fn to_string_lossy(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV output is UTF-8")
    }
}
