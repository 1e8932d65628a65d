//! Deterministic writers: fixed column order, fixed reduction order upstream,
//! and fixed float formatting (17 significant digits, scientific notation),
//! so identical configurations produce byte-identical files.

use std::fmt::Write as _;

/// 17 significant digits, scientific notation.
pub fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

/// Incremental JSON writer for the small, fixed shapes emitted here.
#[derive(Default)]
pub struct JsonWriter {
    buf: String,
}

impl JsonWriter {
    pub fn new() -> Self {
        JsonWriter { buf: String::new() }
    }

    pub fn raw(&mut self, s: &str) -> &mut Self {
        self.buf.push_str(s);
        self
    }

    pub fn string(&mut self, s: &str) -> &mut Self {
        self.buf.push('"');
        for c in s.chars() {
            match c {
                '"' => self.buf.push_str("\\\""),
                '\\' => self.buf.push_str("\\\\"),
                '\n' => self.buf.push_str("\\n"),
                c if (c as u32) < 0x20 => {
                    let _ = write!(self.buf, "\\u{:04x}", c as u32);
                }
                c => self.buf.push(c),
            }
        }
        self.buf.push('"');
        self
    }

    pub fn number(&mut self, x: f64) -> &mut Self {
        self.buf.push_str(&fmt_f(x));
        self
    }

    pub fn integer(&mut self, x: usize) -> &mut Self {
        let _ = write!(self.buf, "{x}");
        self
    }

    pub fn boolean(&mut self, b: bool) -> &mut Self {
        self.buf.push_str(if b { "true" } else { "false" });
        self
    }

    pub fn finish(self) -> String {
        self.buf
    }
}

/// A CSV table accumulated row by row.
pub struct CsvTable {
    buf: String,
    columns: usize,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        CsvTable { buf: format!("{}\n", header.join(",")), columns: header.len() }
    }

    pub fn row(&mut self, cells: &[String]) {
        assert_eq!(cells.len(), self.columns, "csv row width mismatch");
        self.buf.push_str(&cells.join(","));
        self.buf.push('\n');
    }

    pub fn finish(self) -> String {
        self.buf
    }
}
