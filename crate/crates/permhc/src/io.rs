//! Matrix file formats: a whitespace text layout and a JSON object, both
//! carrying arbitrary-precision integer entries and an optional field size.
//!
//! Text: the first line is `n`, followed by `n` rows of `n` integers.
//! JSON: `{"n": 2, "entries": [[1, 2], [3, 4]], "field": 7}` with `field`
//! optional. When a field is given, entries are reduced modulo its
//! characteristic before use.

use crate::error::{Error, Result};
use crate::field::{is_prime_u64, FieldCtx};
use crate::matrix::{FieldMatrix, IntMatrix, Matrix};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use std::str::FromStr;

#[derive(Clone, Debug)]
pub struct MatrixFile {
    pub n: usize,
    pub entries: Vec<Vec<BigInt>>,
    pub field: Option<u64>,
}

impl MatrixFile {
    pub fn to_int_matrix(&self) -> IntMatrix {
        Matrix::from_rows(self.entries.clone()).expect("validated at parse time")
    }

    /// Entries reduced modulo the field characteristic.
    pub fn to_field_matrix(&self, ctx: &FieldCtx) -> FieldMatrix {
        let p = BigInt::from(ctx.p());
        Matrix::from_fn(self.n, |i, j| {
            let r = self.entries[i][j].mod_floor(&p);
            ctx.from_u64(r.to_u64().expect("residue below p"))
        })
    }
}

/// Splits a prime power into `(p, e)`.
pub fn factor_prime_power(q: u64) -> Result<(u64, usize)> {
    if q < 2 {
        return Err(Error::NotPrime(q));
    }
    let mut p = 2u64;
    while p * p <= q {
        if q % p == 0 {
            let mut e = 0;
            let mut rest = q;
            while rest % p == 0 {
                rest /= p;
                e += 1;
            }
            if rest != 1 {
                return Err(Error::NotPrime(q));
            }
            return Ok((p, e));
        }
        p += 1;
    }
    Ok((q, 1))
}

/// Builds the field context for a prime-power size `q`.
pub fn field_for(q: u64) -> Result<FieldCtx> {
    let (p, e) = factor_prime_power(q)?;
    if !is_prime_u64(p) {
        return Err(Error::NotPrime(q));
    }
    FieldCtx::new(p, e)
}

pub fn parse_matrix_str(src: &str) -> Result<MatrixFile> {
    if src.trim_start().starts_with('{') {
        parse_json(src)
    } else {
        parse_text(src)
    }
}

fn parse_text(src: &str) -> Result<MatrixFile> {
    let mut lines = src
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty());
    let (header_line, header) = lines
        .next()
        .ok_or(Error::Parse { line: 1, msg: "empty input".into() })?;
    let n: usize = header.trim().parse().map_err(|_| Error::Parse {
        line: header_line,
        msg: format!("matrix size `{}` is not a nonnegative integer", header.trim()),
    })?;
    if n == 0 {
        return Err(Error::Parse {
            line: header_line,
            msg: "matrix size must be at least 1".into(),
        });
    }
    let mut entries = Vec::with_capacity(n);
    for row_idx in 0..n {
        let (line_no, line) = lines.next().ok_or(Error::Parse {
            line: header_line + row_idx + 1,
            msg: format!("missing row {} of {n}", row_idx + 1),
        })?;
        let mut row = Vec::with_capacity(n);
        for tok in line.split_whitespace() {
            let v = BigInt::from_str(tok).map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("invalid integer `{tok}` in row {}", row_idx + 1),
            })?;
            row.push(v);
        }
        if row.len() != n {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("row {} has {} entries, expected {n}", row_idx + 1, row.len()),
            });
        }
        entries.push(row);
    }
    if let Some((line_no, extra)) = lines.next() {
        return Err(Error::Parse {
            line: line_no,
            msg: format!("unexpected trailing content `{}`", extra.trim()),
        });
    }
    Ok(MatrixFile { n, entries, field: None })
}

fn json_err(msg: impl Into<String>) -> Error {
    Error::Parse { line: 0, msg: msg.into() }
}

fn number_to_bigint(v: &serde_json::Value, what: &str) -> Result<BigInt> {
    let serde_json::Value::Number(num) = v else {
        return Err(json_err(format!("{what} must be an integer")));
    };
    let text = num.to_string();
    if text.contains(['.', 'e', 'E']) {
        return Err(json_err(format!("{what} must be an integer, got `{text}`")));
    }
    BigInt::from_str(&text).map_err(|_| json_err(format!("{what}: bad integer `{text}`")))
}

fn parse_json(src: &str) -> Result<MatrixFile> {
    let value: serde_json::Value = serde_json::from_str(src)
        .map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })?;
    let obj = value
        .as_object()
        .ok_or_else(|| json_err("top level must be an object"))?;
    let n = obj
        .get("n")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| json_err("missing or invalid `n`"))? as usize;
    if n == 0 {
        return Err(json_err("matrix size must be at least 1"));
    }
    let rows = obj
        .get("entries")
        .and_then(|v| v.as_array())
        .ok_or_else(|| json_err("missing `entries` array"))?;
    if rows.len() != n {
        return Err(json_err(format!("expected {n} rows, got {}", rows.len())));
    }
    let mut entries = Vec::with_capacity(n);
    for (i, row) in rows.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| json_err(format!("row {} is not an array", i + 1)))?;
        if row.len() != n {
            return Err(json_err(format!(
                "row {} has {} entries, expected {n}",
                i + 1,
                row.len()
            )));
        }
        let parsed: Result<Vec<BigInt>> = row
            .iter()
            .map(|v| number_to_bigint(v, &format!("entry in row {}", i + 1)))
            .collect();
        entries.push(parsed?);
    }
    let field = match obj.get("field") {
        None | Some(serde_json::Value::Null) => None,
        Some(v) => {
            let q = v
                .as_u64()
                .ok_or_else(|| json_err("`field` must be a positive integer"))?;
            factor_prime_power(q)?;
            Some(q)
        }
    };
    Ok(MatrixFile { n, entries, field })
}
