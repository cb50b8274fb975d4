//! CSV tables and JSON sidecars.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::CliError;

/// `x` with 12 significant digits, positional when the exponent is moderate.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mant, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..12).contains(&exp) {
        let mant = trim(mant);
        return format!("{mant}e{exp}");
    }
    let decimals = (11 - exp).max(0) as usize;
    trim(&format!("{x:.decimals$}")).to_string()
}

fn trim(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn flag(b: bool) -> String {
    if b { "true" } else { "false" }.into()
}

/// A table with a fixed header.
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.header).map_err(|e| CliError::Io(e.to_string()))?;
        for r in &self.rows {
            w.write_record(r).map_err(|e| CliError::Io(e.to_string()))?;
        }
        w.into_inner().map_err(|e| CliError::Io(e.to_string()))
    }
}

/// Writes the table to `out` (stdout when `None`) and the summary next to it as `.json`.
pub fn emit<T: Serialize>(table: &Table, summary: &T, out: Option<&Path>) -> Result<(), CliError> {
    let csv = table.to_bytes()?;
    let json = serde_json::to_string_pretty(summary).map_err(|e| CliError::Io(e.to_string()))? + "\n";
    match out {
        Some(p) => {
            fs::write(p, &csv).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
            let side = sidecar(p);
            fs::write(&side, json).map_err(|e| CliError::Io(format!("{}: {e}", side.display())))?;
        }
        None => {
            std::io::stdout().write_all(&csv).map_err(|e| CliError::Io(e.to_string()))?;
            eprint!("{json}");
        }
    }
    Ok(())
}

pub fn sidecar(p: &Path) -> PathBuf {
    p.with_extension("json")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(num(0.48121182505960347), "0.48121182506");
        assert_eq!(num(-0.48121182505960347), "-0.48121182506");
        assert_eq!(num(1.0), "1");
        assert_eq!(num(-2.0), "-2");
        assert_eq!(num(123456.789), "123456.789");
        assert_eq!(num(1e-9), "1e-9");
        assert_eq!(num(2.5e15), "2.5e15");
        assert_eq!(num(-0.0), "0");
    }
}
