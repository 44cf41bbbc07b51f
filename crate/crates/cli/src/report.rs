//! Rectangular tables of reals with provenance metadata, written as CSV.
//!
//! Layout: `#`-prefixed metadata lines (command, parameters, budget,
//! timestamp), one header line, then one line per row with every real
//! printed to 9 significant digits.

use std::io::Write;
use std::time::{SystemTime, UNIX_EPOCH};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct GridReport {
    pub command: String,
    /// `(name, value)` pairs in the order given.
    pub params: Vec<(String, String)>,
    pub budget: Option<usize>,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub columns: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl GridReport {
    pub fn new(command: &str, columns: &[&str]) -> Self {
        Self {
            command: command.to_string(),
            params: Vec::new(),
            budget: None,
            timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn param(mut self, name: &str, value: impl ToString) -> Self {
        self.params.push((name.to_string(), value.to_string()));
        self
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = Some(budget);
        self
    }

    /// Appends a row; its length must match the column count.
    pub fn push_row(&mut self, row: Vec<f64>) -> Result<(), CliError> {
        if row.len() != self.columns.len() {
            return Err(CliError::Input(format!("row has {} values, expected {}", row.len(), self.columns.len())));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// Values of the named column.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<(), CliError> {
        writeln!(out, "# command: {}", self.command)?;
        let params: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        writeln!(out, "# params: {}", params.join(" "))?;
        match self.budget {
            Some(b) => writeln!(out, "# budget: {b}")?,
            None => writeln!(out, "# budget: none")?,
        }
        writeln!(out, "# timestamp: {}", self.timestamp)?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|&v| format_sig9(v)))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is utf-8")
    }
}

/// Shortest decimal rendering with 9 significant digits, in the manner of
/// C's `%.9g`.
pub fn format_sig9(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..9).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{m}e{sign}{:02}", exp.abs());
    }
    let decimals = (8 - exp).max(0) as usize;
    trim_zeros(&format!("{v:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
