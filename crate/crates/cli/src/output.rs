// Copyright 2026 The spinlink Authors
// SPDX-License-Identifier: Apache-2.0

//! CSV and JSON emission with fixed 12-significant-digit numbers.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::CliError;

pub const SIGNIFICANT_DIGITS: usize = 12;

/// Scientific notation with at most 12 significant digits and no trailing
/// zeros, e.g. `1.7881e4`. Independent of locale.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exponent) = s.split_once('e').expect("exponent marker");
    let mantissa = if mantissa.contains('.') {
        mantissa.trim_end_matches('0').trim_end_matches('.')
    } else {
        mantissa
    };
    format!("{mantissa}e{exponent}")
}

/// `x` rounded to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x.is_finite() {
        fmt_num(x).parse().expect("formatted float parses")
    } else {
        x
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// A named CSV table. Rows are formatted cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub file_name: &'static str,
    pub header: &'static [&'static str],
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(file_name: &'static str, header: &'static [&'static str]) -> Self {
        Self {
            file_name,
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let wrap = |e: csv::Error| CliError::Numerical(format!("csv encoding: {e}"));
        w.write_record(self.header).map_err(wrap)?;
        for row in &self.rows {
            w.write_record(row).map_err(wrap)?;
        }
        w.into_inner().map_err(|e| CliError::Numerical(format!("csv encoding: {e}")))
    }
}

/// JSON document with every float rounded to 12 significant digits.
pub fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut v = serde_json::to_value(value).map_err(|e| CliError::Numerical(format!("json encoding: {e}")))?;
    round_value(&mut v);
    let mut out = serde_json::to_vec_pretty(&v).map_err(|e| CliError::Numerical(format!("json encoding: {e}")))?;
    out.push(b'\n');
    Ok(out)
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n.as_f64().map(round_sig).and_then(serde_json::Number::from_f64) {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Files produced by one run, written only after every computation
/// succeeded.
#[derive(Debug, Default)]
pub struct Artifacts {
    files: Vec<(String, Vec<u8>)>,
}

impl Artifacts {
    pub fn table(&mut self, t: &Table) -> Result<(), CliError> {
        let bytes = t.to_bytes()?;
        self.files.push((t.file_name.to_string(), bytes));
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let bytes = json_bytes(value)?;
        self.files.push((name.to_string(), bytes));
        Ok(())
    }

    pub fn write_all(&self, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        let mut written = Vec::with_capacity(self.files.len());
        for (name, bytes) in &self.files {
            let path = dir.join(name);
            fs::write(&path, bytes).map_err(io_err(&path))?;
            written.push(path);
        }
        Ok(written)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.files.iter().map(|(n, _)| n.as_str())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_have_twelve_significant_digits() {
        assert_eq!(fmt_num(17881.2), "1.78812e4");
        assert_eq!(fmt_num(1.0 / 3.0), "3.33333333333e-1");
        assert_eq!(fmt_num(-2.5e-9), "-2.5e-9");
        assert_eq!(fmt_num(1.0), "1e0");
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(-0.0), "0");
    }

    #[test]
    fn formatted_values_parse_back() {
        for x in [std::f64::consts::PI, 1e-300, 6.02214076e23, -123.456] {
            let back: f64 = fmt_num(x).parse().unwrap();
            assert!(((back - x) / x).abs() < 5e-12);
        }
    }

    #[test]
    fn empty_table_is_header_only() {
        let t = Table::new("x.csv", &["a", "b"]);
        assert_eq!(t.to_bytes().unwrap(), b"a,b\n");
    }

    #[test]
    fn json_floats_are_rounded() {
        let bytes = json_bytes(&serde_json::json!({"x": 1.0 / 3.0, "n": 7})).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        assert!(text.contains("0.333333333333"), "{text}");
        assert!(!text.contains("0.3333333333333"), "{text}");
        assert!(text.contains("\"n\": 7"));
    }
}
