//! Text file formats and fixed-precision number output.

use std::fmt::Write as _;
use std::path::Path;

use modecay_core::Complex64;
use serde_json::Value;

use crate::error::{CliError, CliResult};

/// Significant digits of every emitted number.
pub const DIGITS: usize = 12;

/// Formats `x` with 12 significant digits, `.` as decimal separator and
/// no trailing zeros; scientific notation outside `[1e-5, 1e12)`.
pub fn number(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{:.*e}", DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if (-5..DIGITS as i32).contains(&exp) {
        let decimals = (DIGITS as i32 - 1 - exp).max(0) as usize;
        trim(&format!("{:.*}", decimals, x)).to_string()
    } else {
        format!("{}e{}", trim(mantissa), exp)
    }
}

fn trim(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `x` rounded to 12 significant digits, as a JSON number (`null` when not
/// finite).
pub fn json_number(x: f64) -> Value {
    if x.is_finite() {
        let rounded: f64 = number(x).parse().expect("formatted number parses");
        serde_json::Number::from_f64(rounded).map_or(Value::Null, Value::Number)
    } else {
        Value::Null
    }
}

/// Renders a header and rows as CSV.
pub fn csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Renders rows of named numeric columns as a JSON array of objects.
pub fn json_rows(header: &[&str], rows: &[Vec<Value>]) -> Value {
    Value::Array(
        rows.iter()
            .map(|row| Value::Object(header.iter().map(|h| h.to_string()).zip(row.iter().cloned()).collect()))
            .collect(),
    )
}

pub fn pretty(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values serialize");
    s.push('\n');
    s
}

/// Parses whitespace- or comma-separated numeric columns; `#` starts a
/// comment and blank lines are skipped. Every row must have `columns`
/// entries.
pub fn parse_columns(text: &str, columns: usize, path: &Path) -> CliResult<Vec<Vec<f64>>> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|f| !f.is_empty())
            .collect();
        let error = |message: String| CliError::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            message,
        };
        if fields.len() != columns {
            return Err(error(format!("expected {columns} columns, found {}", fields.len())));
        }
        let row = fields
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| error(format!("'{f}' is not a finite number")))
            })
            .collect::<CliResult<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::Parse {
            path: path.to_path_buf(),
            line: 0,
            message: "no data rows".into(),
        });
    }
    Ok(rows)
}

pub fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })
}

/// Two-column `(x, y)` file: tabulated spectra `(ω, G)` and bands `(ω_a, P)`.
pub fn read_pairs(path: &Path) -> CliResult<Vec<(f64, f64)>> {
    let rows = parse_columns(&read_text(path)?, 2, path)?;
    Ok(rows.into_iter().map(|r| (r[0], r[1])).collect())
}

/// Three-column harmonic list `(ω_k, Re ε_k, Im ε_k)`.
pub fn read_harmonics(path: &Path) -> CliResult<Vec<(f64, Complex64)>> {
    let rows = parse_columns(&read_text(path)?, 3, path)?;
    Ok(rows.into_iter().map(|r| (r[0], Complex64::new(r[1], r[2]))).collect())
}

/// Writes two columns back in the format [`read_pairs`] accepts.
pub fn write_pairs(points: &[(f64, f64)]) -> String {
    let mut out = String::new();
    for &(x, y) in points {
        let _ = writeln!(out, "{} {}", number(x), number(y));
    }
    out
}
