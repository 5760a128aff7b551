//! Plain-text matrix and vector format.
//!
//! ```text
//! 2
//! 1e0+0e0i 5e-1-2e0i
//! 0e0+0e0i 1e0+0e0i
//! ```
//!
//! The first line holds `d`; each of the next `d` lines holds `d` entries
//! `re±imi`. The writer emits shortest round-trip exponent notation, so
//! writing then reading reproduces every bit (including signed zeros).
//! The reader also accepts a bare real (`1.5`) or bare imaginary (`2i`).
//! Vectors use the same layout with a single line of `d` entries.

use std::fmt::Write as _;

use thiserror::Error;

use super::{CMatrix, CVector, C64};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("unexpected end of input (expected {expected})")]
    Eof { expected: String },
}

impl ParseError {
    pub fn at(line: usize, msg: impl Into<String>) -> Self {
        ParseError::Syntax { line, msg: msg.into() }
    }

    pub fn line(&self) -> Option<usize> {
        match self {
            ParseError::Syntax { line, .. } => Some(*line),
            ParseError::Eof { .. } => None,
        }
    }
}

pub fn format_entry(z: C64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{:e}{}{:e}i", z.re, sign, z.im.abs())
}

/// Parses one `re±imi` token.
pub fn parse_entry(tok: &str) -> Option<C64> {
    let tok = tok.trim();
    if tok.is_empty() {
        return None;
    }
    let Some(body) = tok.strip_suffix('i') else {
        return finite(tok.parse::<f64>().ok()?).map(|re| C64::new(re, 0.0));
    };
    let bytes = body.as_bytes();
    // split at the last sign that is not leading and not part of an exponent
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    match split {
        Some(k) => {
            let re = finite(body[..k].parse::<f64>().ok()?)?;
            let im_str = &body[k..];
            let im = match im_str {
                "+" => 1.0,
                "-" => -1.0,
                s => finite(s.parse::<f64>().ok()?)?,
            };
            Some(C64::new(re, im))
        }
        None => {
            let im = match body {
                "" | "+" => 1.0,
                "-" => -1.0,
                s => finite(s.parse::<f64>().ok()?)?,
            };
            Some(C64::new(0.0, im))
        }
    }
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

pub fn write_matrix(a: &CMatrix) -> String {
    let mut out = String::new();
    writeln!(out, "{}", a.dim()).unwrap();
    for i in 0..a.dim() {
        let row: Vec<String> = a.row(i).iter().map(|&z| format_entry(z)).collect();
        writeln!(out, "{}", row.join(" ")).unwrap();
    }
    out
}

pub fn write_vector(x: &CVector) -> String {
    let entries: Vec<String> = x.as_slice().iter().map(|&z| format_entry(z)).collect();
    format!("{}\n{}\n", x.dim(), entries.join(" "))
}

/// Line cursor that skips blank lines and `#` comments, tracking 1-based line
/// numbers for diagnostics.
pub struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    offset: usize,
}

impl<'a> Lines<'a> {
    pub fn new(text: &'a str) -> Self {
        Self::with_offset(text, 0)
    }

    pub fn with_offset(text: &'a str, offset: usize) -> Self {
        Self {
            inner: text.lines().enumerate(),
            offset,
        }
    }

    pub fn next_content(&mut self) -> Option<(usize, &'a str)> {
        for (idx, raw) in self.inner.by_ref() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if !line.is_empty() {
                return Some((idx + 1 + self.offset, line));
            }
        }
        None
    }

    pub fn expect(&mut self, what: &str) -> Result<(usize, &'a str), ParseError> {
        self.next_content().ok_or_else(|| ParseError::Eof {
            expected: what.to_string(),
        })
    }
}

fn parse_dim(line: usize, s: &str) -> Result<usize, ParseError> {
    let d: usize = s
        .parse()
        .map_err(|_| ParseError::at(line, format!("expected dimension, found `{s}`")))?;
    if d == 0 {
        return Err(ParseError::at(line, "dimension must be at least 1"));
    }
    Ok(d)
}

fn parse_row(line: usize, s: &str, d: usize) -> Result<Vec<C64>, ParseError> {
    let toks: Vec<&str> = s.split_whitespace().collect();
    if toks.len() != d {
        return Err(ParseError::at(
            line,
            format!("expected {d} entries, found {}", toks.len()),
        ));
    }
    toks.iter()
        .map(|t| parse_entry(t).ok_or_else(|| ParseError::at(line, format!("invalid entry `{t}`"))))
        .collect()
}

/// Reads one matrix block from the cursor.
pub fn read_matrix_block(lines: &mut Lines<'_>) -> Result<CMatrix, ParseError> {
    let (line, s) = lines.expect("matrix dimension")?;
    let d = parse_dim(line, s)?;
    let mut data = Vec::with_capacity(d * d);
    for r in 0..d {
        let (line, s) = lines.expect(&format!("matrix row {}", r + 1))?;
        data.extend(parse_row(line, s, d)?);
    }
    Ok(CMatrix::from_vec_unchecked(d, data))
}

pub fn read_matrix(text: &str) -> Result<CMatrix, ParseError> {
    let mut lines = Lines::new(text);
    let m = read_matrix_block(&mut lines)?;
    if let Some((line, _)) = lines.next_content() {
        return Err(ParseError::at(line, "trailing content after matrix"));
    }
    Ok(m)
}

pub fn read_vector(text: &str) -> Result<CVector, ParseError> {
    let mut lines = Lines::new(text);
    let (line, s) = lines.expect("vector dimension")?;
    let d = parse_dim(line, s)?;
    let mut entries = Vec::with_capacity(d);
    while entries.len() < d {
        let (line, s) = lines.expect("vector entries")?;
        for t in s.split_whitespace() {
            entries.push(parse_entry(t).ok_or_else(|| ParseError::at(line, format!("invalid entry `{t}`")))?);
        }
    }
    if entries.len() != d {
        return Err(ParseError::Eof {
            expected: format!("exactly {d} vector entries"),
        });
    }
    Ok(CVector::from_vec_unchecked(entries))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn entry_forms() {
        assert_eq!(parse_entry("1e0+2e0i"), Some(C64::new(1.0, 2.0)));
        assert_eq!(parse_entry("-5e-1-3e-2i"), Some(C64::new(-0.5, -0.03)));
        assert_eq!(parse_entry("1.5"), Some(C64::new(1.5, 0.0)));
        assert_eq!(parse_entry("-2i"), Some(C64::new(0.0, -2.0)));
        assert_eq!(parse_entry("1E+3-1E-3i"), Some(C64::new(1000.0, -0.001)));
        assert_eq!(parse_entry("nan"), None);
        assert_eq!(parse_entry("1+inf i"), None);
        assert_eq!(parse_entry("abc"), None);
    }

    #[test]
    fn reports_line_of_bad_entry() {
        let err = read_matrix("2\n1 0\n0 x\n").unwrap_err();
        assert_eq!(err.line(), Some(3));
        let err = read_matrix("2\n1 0 0\n0 1\n").unwrap_err();
        assert_eq!(err.line(), Some(2));
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let m = read_matrix("# shift\n2\n\n0 1  # first row\n0 0\n").unwrap();
        assert_eq!(m, CMatrix::shift(2));
    }

    #[test]
    fn signed_zero_survives() {
        let z = C64::new(-0.0, -0.0);
        let back = parse_entry(&format_entry(z)).unwrap();
        assert!(back.re.is_sign_negative() && back.im.is_sign_negative());
    }

    fn finite_f64() -> impl Strategy<Value = f64> {
        any::<f64>().prop_filter("finite", |x| x.is_finite())
    }

    proptest! {
        #[test]
        fn matrix_text_round_trip_is_bit_exact(
            d in 1usize..5,
            vals in prop::collection::vec((finite_f64(), finite_f64()), 16)
        ) {
            let data: Vec<C64> = vals.iter().take(d * d).map(|&(re, im)| C64::new(re, im)).collect();
            let a = CMatrix::new(d, data).unwrap();
            let back = read_matrix(&write_matrix(&a)).unwrap();
            for (x, y) in a.as_slice().iter().zip(back.as_slice()) {
                prop_assert_eq!(x.re.to_bits(), y.re.to_bits());
                prop_assert_eq!(x.im.to_bits(), y.im.to_bits());
            }
        }

        #[test]
        fn vector_text_round_trip(vals in prop::collection::vec((finite_f64(), finite_f64()), 1..6)) {
            let x = CVector::new(vals.iter().map(|&(re, im)| C64::new(re, im)).collect()).unwrap();
            prop_assert_eq!(read_vector(&write_vector(&x)).unwrap(), x);
        }
    }
}
