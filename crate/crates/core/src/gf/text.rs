//! Text format for matrices:
//!
//! ```text
//! matrix <rows> <cols> mod <q>
//! <row 0 residues separated by single spaces>
//! ...
//! ```

use super::field::PrimeField;
use super::matrix::FieldMatrix;
use crate::error::{parse_err, Result};

/// Line-oriented reader shared by the text formats; tracks 1-based line numbers
/// and skips blank lines and `#` comments.
pub struct LineReader<'a> {
    lines: std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'a>>>,
    last: usize,
}

impl<'a> LineReader<'a> {
    pub fn new(text: &'a str) -> Self {
        LineReader {
            lines: text.lines().enumerate().peekable(),
            last: 0,
        }
    }

    fn skip_blank(&mut self) {
        while let Some((_, l)) = self.lines.peek() {
            let t = l.trim();
            if t.is_empty() || t.starts_with('#') {
                self.lines.next();
            } else {
                break;
            }
        }
    }

    pub fn peek(&mut self) -> Option<&'a str> {
        self.skip_blank();
        self.lines.peek().map(|(_, l)| *l)
    }

    /// Next significant line with its 1-based number.
    pub fn next_line(&mut self) -> Option<(usize, &'a str)> {
        self.skip_blank();
        let (i, l) = self.lines.next()?;
        self.last = i + 1;
        Some((i + 1, l))
    }

    /// Next line, which may be empty (used for zero-width matrix rows).
    pub fn next_raw(&mut self) -> Option<(usize, &'a str)> {
        let (i, l) = self.lines.next()?;
        self.last = i + 1;
        Some((i + 1, l))
    }

    pub fn expect_line(&mut self, what: &str) -> Result<(usize, &'a str)> {
        let last = self.last;
        self.next_line()
            .ok_or_else(|| parse_err(last + 1, format!("unexpected end of input, expected {what}")))
    }

    pub fn line_number(&self) -> usize {
        self.last
    }
}

pub(crate) fn parse_usize(line: usize, tok: Option<&str>, what: &str) -> Result<usize> {
    tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?
        .parse()
        .map_err(|_| parse_err(line, format!("invalid {what}")))
}

pub(crate) fn parse_u64(line: usize, tok: Option<&str>, what: &str) -> Result<u64> {
    tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?
        .parse()
        .map_err(|_| parse_err(line, format!("invalid {what}")))
}

/// Reads one matrix block from the reader.
pub fn read_matrix(reader: &mut LineReader<'_>) -> Result<FieldMatrix> {
    let (ln, header) = reader.expect_line("matrix header")?;
    let mut toks = header.split_whitespace();
    if toks.next() != Some("matrix") {
        return Err(parse_err(ln, "expected `matrix <rows> <cols> mod <q>`"));
    }
    let rows = parse_usize(ln, toks.next(), "row count")?;
    let cols = parse_usize(ln, toks.next(), "column count")?;
    if toks.next() != Some("mod") {
        return Err(parse_err(ln, "expected `mod`"));
    }
    let q = parse_u64(ln, toks.next(), "modulus")?;
    if toks.next().is_some() {
        return Err(parse_err(ln, "trailing tokens in matrix header"));
    }
    let field = PrimeField::new(q).map_err(|e| parse_err(ln, e.to_string()))?;
    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows {
        let (ln, line) = if cols == 0 {
            reader
                .next_raw()
                .ok_or_else(|| parse_err(ln, "missing matrix row"))?
        } else {
            reader.expect_line("matrix row")?
        };
        let before = data.len();
        for tok in line.split_whitespace() {
            let v: u64 = tok
                .parse()
                .map_err(|_| parse_err(ln, format!("invalid entry `{tok}`")))?;
            if v >= q {
                return Err(parse_err(ln, format!("entry {v} is not a residue mod {q}")));
            }
            data.push(v as u32);
        }
        if data.len() - before != cols {
            return Err(parse_err(
                ln,
                format!("expected {cols} entries, found {}", data.len() - before),
            ));
        }
    }
    Ok(FieldMatrix::from_raw(field, rows, cols, data))
}

impl std::str::FromStr for FieldMatrix {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut reader = LineReader::new(s);
        let m = read_matrix(&mut reader)?;
        if let Some((ln, _)) = reader.next_line() {
            return Err(parse_err(ln, "trailing content after matrix"));
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let f = PrimeField::new(7).unwrap();
        let m = FieldMatrix::from_rows(f, &[vec![1, 0, 6], vec![3, 2, 5]]).unwrap();
        let text = m.to_string();
        assert_eq!(text, "matrix 2 3 mod 7\n1 0 6\n3 2 5\n");
        let back: FieldMatrix = text.parse().unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_string(), text);
    }

    #[test]
    fn reports_line_numbers() {
        let err = "matrix 2 2 mod 3\n1 2\n1 3\n".parse::<FieldMatrix>().unwrap_err();
        assert_eq!(
            err,
            crate::error::Error::Parse {
                line: 3,
                message: "entry 3 is not a residue mod 3".into()
            }
        );
        assert!("matrix 1 1 mod 4\n0\n".parse::<FieldMatrix>().is_err());
    }
}
