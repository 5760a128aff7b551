//! Family files.
//!
//! ```text
//! # F(h) = A + exp(−1/h)·B
//! dim 2
//! const
//! 2
//! 1e0+0e0i 0e0+0e0i
//! 0e0+0e0i 2e0+0e0i
//! expinv 1
//! 2
//! 0e0+0e0i 1e0+0e0i
//! 0e0+0e0i 0e0+0e0i
//! ```
//!
//! After `dim d`, each term is a coefficient line (`const`, `pow p`,
//! `expinv a` or `powexp p a`) followed by a matrix block.

use std::fmt::Write as _;

use crate::linalg::io::{read_matrix_block, write_matrix, Lines, ParseError};

use super::{CoeffFn, FamilyError, OperatorFamily};

fn parse_number(line: usize, tok: Option<&str>, what: &str) -> Result<f64, ParseError> {
    let tok = tok.ok_or_else(|| ParseError::at(line, format!("missing {what}")))?;
    tok.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| ParseError::at(line, format!("invalid {what} `{tok}`")))
}

fn parse_coeff(line: usize, s: &str) -> Result<CoeffFn, ParseError> {
    let mut toks = s.split_whitespace();
    let kind = toks.next().unwrap_or("");
    let coeff = match kind {
        "const" => Ok(CoeffFn::Const),
        "pow" => CoeffFn::pow(parse_number(line, toks.next(), "exponent")?),
        "expinv" => {
            let a = parse_number(line, toks.next(), "rate")?;
            if a <= 0.0 {
                return Err(ParseError::at(line, "expinv rate must be > 0"));
            }
            CoeffFn::exp_inv(a)
        }
        "powexp" => {
            let p = parse_number(line, toks.next(), "exponent")?;
            let a = parse_number(line, toks.next(), "rate")?;
            CoeffFn::pow_exp(p, a)
        }
        other => {
            return Err(ParseError::at(
                line,
                format!("expected coefficient (const | pow p | expinv a | powexp p a), found `{other}`"),
            ))
        }
    }
    .map_err(|e| ParseError::at(line, e.to_string()))?;
    if let Some(extra) = toks.next() {
        return Err(ParseError::at(line, format!("unexpected token `{extra}`")));
    }
    Ok(coeff)
}

pub fn read_family(text: &str) -> Result<OperatorFamily, FamilyError> {
    let mut lines = Lines::new(text);
    let (line, s) = lines.expect("`dim d`")?;
    let d = s
        .strip_prefix("dim")
        .and_then(|rest| rest.trim().parse::<usize>().ok())
        .filter(|&d| d > 0)
        .ok_or_else(|| ParseError::at(line, format!("expected `dim d`, found `{s}`")))?;
    let mut fam = OperatorFamily::zero(d);
    while let Some((line, s)) = lines.next_content() {
        let coeff = parse_coeff(line, s)?;
        let m = read_matrix_block(&mut lines)?;
        if m.dim() != d {
            return Err(ParseError::at(line, format!("term has dimension {}, family has {d}", m.dim())).into());
        }
        fam = fam.with_term(coeff, m)?;
    }
    Ok(fam)
}

pub fn write_family(f: &OperatorFamily) -> Result<String, FamilyError> {
    let mut out = String::new();
    writeln!(out, "dim {}", f.dim()).unwrap();
    for (c, m) in f.terms() {
        if !c.is_catalog() {
            return Err(FamilyError::NotSerializable(c.to_string()));
        }
        writeln!(out, "{c}").unwrap();
        out.push_str(&write_matrix(m));
    }
    Ok(out)
}
