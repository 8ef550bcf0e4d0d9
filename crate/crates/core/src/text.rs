//! The plain-text matrix format shared by every command.
//!
//! ```text
//! p q sigma
//! <p lines>
//! ```
//!
//! For `sigma = 2` each line holds `q` contiguous characters from `{0,1}`;
//! otherwise each line holds `q` space-separated decimal symbols below
//! `sigma`. Anything after the `p` data lines other than blank lines is
//! rejected.

use std::fmt::Write as _;

use crate::bits::{BitMatrix, SymbolMatrix};
use crate::error::{Error, Result};

/// A parsed matrix file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Matrix {
    Binary(BitMatrix),
    Symbols(SymbolMatrix),
}

impl Matrix {
    pub fn rows(&self) -> usize {
        match self {
            Matrix::Binary(m) => m.rows(),
            Matrix::Symbols(m) => m.rows(),
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            Matrix::Binary(m) => m.cols(),
            Matrix::Symbols(m) => m.cols(),
        }
    }

    pub fn sigma(&self) -> u32 {
        match self {
            Matrix::Binary(_) => 2,
            Matrix::Symbols(m) => m.sigma(),
        }
    }

    /// The matrix as symbols (binary matrices become `sigma = 2`).
    pub fn to_symbols(&self) -> SymbolMatrix {
        match self {
            Matrix::Binary(m) => SymbolMatrix::from(m),
            Matrix::Symbols(m) => m.clone(),
        }
    }

    /// The matrix as packed bits; fails for `sigma > 2`.
    pub fn to_bits(&self) -> Result<BitMatrix> {
        match self {
            Matrix::Binary(m) => Ok(m.clone()),
            Matrix::Symbols(m) => m.to_bits(),
        }
    }

    pub fn transpose(&self) -> Matrix {
        match self {
            Matrix::Binary(m) => Matrix::Binary(m.transpose()),
            Matrix::Symbols(m) => Matrix::Symbols(m.transpose()),
        }
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn header_field(tok: Option<&str>, name: &str) -> Result<u64> {
    let tok = tok.ok_or_else(|| parse_err(1, format!("missing {name} in header")))?;
    tok.parse()
        .map_err(|_| parse_err(1, format!("{name} '{tok}' is not a nonnegative integer")))
}

pub fn parse_matrix(input: &str) -> Result<Matrix> {
    let mut lines = input.lines().map(|l| l.strip_suffix('\r').unwrap_or(l));
    let header = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let mut fields = header.split_whitespace();
    let p = header_field(fields.next(), "row count")? as usize;
    let q = header_field(fields.next(), "column count")? as usize;
    let sigma = header_field(fields.next(), "alphabet size")?;
    if let Some(extra) = fields.next() {
        return Err(parse_err(1, format!("unexpected header field '{extra}'")));
    }
    if q == 0 {
        return Err(parse_err(1, "column count must be positive"));
    }
    if !(2..=crate::bits::MAX_SIGMA as u64).contains(&sigma) {
        return Err(parse_err(1, format!("alphabet size {sigma} out of range")));
    }
    let sigma = sigma as u32;

    let mut data: Vec<&str> = Vec::with_capacity(p);
    for i in 0..p {
        let line = lines
            .next()
            .ok_or_else(|| parse_err(i + 2, format!("expected {p} rows, found {i}")))?;
        data.push(line);
    }
    for (extra, line) in lines.enumerate() {
        if !line.trim().is_empty() {
            return Err(parse_err(p + 2 + extra, "trailing data after last row"));
        }
    }

    if sigma == 2 {
        let mut m = BitMatrix::zeros(p, q);
        for (i, line) in data.iter().enumerate() {
            let bytes = line.as_bytes();
            if bytes.len() != q {
                return Err(parse_err(
                    i + 2,
                    format!("expected {q} bits, found {} characters", bytes.len()),
                ));
            }
            for (j, &b) in bytes.iter().enumerate() {
                match b {
                    b'0' => {}
                    b'1' => m.set(i, j, true),
                    _ => return Err(parse_err(i + 2, format!("invalid bit '{}'", b as char))),
                }
            }
        }
        Ok(Matrix::Binary(m))
    } else {
        let mut m = SymbolMatrix::zeros(p, q, sigma)?;
        for (i, line) in data.iter().enumerate() {
            let mut count = 0;
            for (j, tok) in line.split_whitespace().enumerate() {
                if j >= q {
                    return Err(parse_err(i + 2, format!("more than {q} symbols")));
                }
                let s: u32 = tok
                    .parse()
                    .map_err(|_| parse_err(i + 2, format!("invalid symbol '{tok}'")))?;
                if s >= sigma {
                    return Err(parse_err(
                        i + 2,
                        format!("symbol {s} outside alphabet of size {sigma}"),
                    ));
                }
                m.set(i, j, s)?;
                count += 1;
            }
            if count != q {
                return Err(parse_err(i + 2, format!("expected {q} symbols, found {count}")));
            }
        }
        Ok(Matrix::Symbols(m))
    }
}

pub fn write_matrix(m: &Matrix) -> String {
    let mut out = String::new();
    writeln!(out, "{} {} {}", m.rows(), m.cols(), m.sigma()).unwrap();
    match m {
        Matrix::Binary(b) => {
            for i in 0..b.rows() {
                out.extend((0..b.cols()).map(|j| if b.get(i, j) { '1' } else { '0' }));
                out.push('\n');
            }
        }
        Matrix::Symbols(s) => {
            for i in 0..s.rows() {
                for j in 0..s.cols() {
                    if j > 0 {
                        out.push(' ');
                    }
                    write!(out, "{}", s.get(i, j)).unwrap();
                }
                out.push('\n');
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_roundtrip() {
        let text = "2 5 2\n01101\n10000\n";
        let m = parse_matrix(text).unwrap();
        assert_eq!(m, Matrix::Binary(BitMatrix::from_strs(&["01101", "10000"]).unwrap()));
        assert_eq!(write_matrix(&m), text);
    }

    #[test]
    fn symbol_roundtrip() {
        let text = "2 3 5\n0 4 2\n1 1 3\n";
        let m = parse_matrix(text).unwrap();
        assert_eq!(m.sigma(), 5);
        assert_eq!(write_matrix(&m), text);
    }

    #[test]
    fn rejects_bad_inputs() {
        for bad in [
            "",
            "2 3\n",
            "2 3 2 9\n010\n111\n",
            "2 3 2\n010\n",
            "2 3 2\n010\n111\n000\n",
            "2 3 2\n010\n11\n",
            "1 3 2\n01x\n",
            "1 3 3\n0 1\n",
            "1 3 3\n0 1 2 0\n",
            "1 3 3\n0 1 3\n",
            "1 0 2\n\n",
            "1 1 1\n0\n",
        ] {
            assert!(
                matches!(parse_matrix(bad), Err(Error::Parse { .. })),
                "accepted {bad:?}"
            );
        }
    }

    #[test]
    fn tolerates_trailing_blank_lines_and_crlf() {
        let m = parse_matrix("1 2 2\r\n10\r\n\n").unwrap();
        assert_eq!(m.to_bits().unwrap(), BitMatrix::from_strs(&["10"]).unwrap());
    }
}
