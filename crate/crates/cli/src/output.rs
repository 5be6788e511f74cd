//! CSV output: UTF-8, LF line endings, header row, fixed column order,
//! 10 significant digits in scientific notation, no locale formatting.

use std::io::Write;
use std::path::Path;

use crate::CliError;

/// One value at 10 significant digits.
pub fn g10(x: f64) -> String {
    format!("{x:.9e}")
}

pub struct Csv {
    rows: Vec<String>,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Self { rows: vec![header.join(",")] }
    }

    pub fn row(&mut self, cells: &[String]) {
        self.rows.push(cells.join(","));
    }

    pub fn render(&self) -> String {
        let mut out = self.rows.join("\n");
        out.push('\n');
        out
    }

    /// Writes to `path` or stdout when none is given.
    pub fn emit(&self, path: Option<&Path>) -> Result<(), CliError> {
        let text = self.render();
        match path {
            Some(p) => std::fs::write(p, text)
                .map_err(|e| CliError::Config(format!("cannot write {}: {e}", p.display()))),
            None => {
                std::io::stdout()
                    .write_all(text.as_bytes())
                    .map_err(|e| CliError::Config(format!("stdout: {e}")))?;
                Ok(())
            }
        }
    }
}

/// Helper for cells mixing text and numbers.
pub fn cells(parts: &[CsvCell]) -> Vec<String> {
    parts
        .iter()
        .map(|c| match c {
            CsvCell::Num(x) => g10(*x),
            CsvCell::Int(i) => i.to_string(),
        })
        .collect()
}

pub enum CsvCell {
    Num(f64),
    Int(i64),
}
