//! Simultaneous similarity of matrix families.
//!
//! Family pair file:
//!
//! ```text
//! family <count> <rows> <cols> mod <q>
//! blocks <sizes of the row classes>
//! blocks <sizes of the column classes>
//! <count matrices rows x rows>
//! <count matrices cols x cols>
//! ```

mod decide;
mod intertwine;
mod random;

pub use decide::{
    brute_force_similar, check_block_properties, decide_sim_similar, is_loc_sim_similar, BlockProperties,
    Decider, BRUTE_FORCE_BUDGET,
};
pub use intertwine::{centralizer, diag_project};
pub use random::{random_block_family, random_family};

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use crate::algebra::ModuleBasis;
use crate::error::{parse_err, Error, Result};
use crate::gf::text::{parse_u64, parse_usize, read_matrix, LineReader};
use crate::gf::{FieldMatrix, PrimeField};

/// Index sets `I = 0..|I|` and `J = 0..|J|` cut into consecutive colour classes
/// `I_0, I_1, ...` and `J_0, J_1, ...` with `|I_k| = |J_k|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColouredIndexPair {
    left: Vec<usize>,
    right: Vec<usize>,
    left_starts: Vec<usize>,
    right_starts: Vec<usize>,
}

fn starts(sizes: &[usize]) -> Vec<usize> {
    let mut out = vec![0];
    for s in sizes {
        out.push(out.last().unwrap() + s);
    }
    out
}

impl ColouredIndexPair {
    pub fn from_sizes(left: Vec<usize>, right: Vec<usize>) -> Result<Self> {
        if left.len() != right.len() {
            return Err(Error::InvalidCip(format!(
                "{} row classes vs {} column classes",
                left.len(),
                right.len()
            )));
        }
        if let Some(k) = (0..left.len()).find(|&k| left[k] != right[k]) {
            return Err(Error::InvalidCip(format!(
                "class {k} has {} rows but {} columns",
                left[k], right[k]
            )));
        }
        Ok(ColouredIndexPair {
            left_starts: starts(&left),
            right_starts: starts(&right),
            left,
            right,
        })
    }

    /// One class on each side.
    pub fn trivial(n: usize) -> Self {
        ColouredIndexPair::from_sizes(vec![n], vec![n]).expect("equal sizes")
    }

    pub fn blocks(&self) -> usize {
        self.left.len()
    }

    pub fn left_sizes(&self) -> &[usize] {
        &self.left
    }

    pub fn right_sizes(&self) -> &[usize] {
        &self.right
    }

    pub fn left_len(&self) -> usize {
        *self.left_starts.last().unwrap()
    }

    pub fn right_len(&self) -> usize {
        *self.right_starts.last().unwrap()
    }

    pub fn left_range(&self, k: usize) -> Range<usize> {
        self.left_starts[k]..self.left_starts[k + 1]
    }

    pub fn right_range(&self, k: usize) -> Range<usize> {
        self.right_starts[k]..self.right_starts[k + 1]
    }
}

/// Families `M = (M_k)` on `I x I` and `N = (N_k)` on `J x J` over one field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixFamilyPair {
    field: PrimeField,
    cip: ColouredIndexPair,
    m: Vec<FieldMatrix>,
    n: Vec<FieldMatrix>,
}

impl MatrixFamilyPair {
    pub fn new(field: PrimeField, cip: ColouredIndexPair, m: Vec<FieldMatrix>, n: Vec<FieldMatrix>) -> Result<Self> {
        if m.len() != n.len() {
            return Err(Error::DimensionMismatch(format!("{} vs {} family members", m.len(), n.len())));
        }
        let (rows, cols) = (cip.left_len(), cip.right_len());
        for (a, b) in m.iter().zip(&n) {
            if a.field() != field || b.field() != field {
                let other = if a.field() != field { a.field() } else { b.field() };
                return Err(Error::FieldMismatch {
                    left: field.modulus(),
                    right: other.modulus(),
                });
            }
            if a.shape() != (rows, rows) || b.shape() != (cols, cols) {
                return Err(Error::ShapeMismatch(format!(
                    "members {:?} and {:?} do not fit index sets of sizes {rows} and {cols}",
                    a.shape(),
                    b.shape()
                )));
            }
        }
        Ok(MatrixFamilyPair { field, cip, m, n })
    }

    /// Single-class index pair.
    pub fn unblocked(field: PrimeField, m: Vec<FieldMatrix>, n: Vec<FieldMatrix>) -> Result<Self> {
        let size = m.first().map_or(0, |x| x.rows());
        let cols = n.first().map_or(size, |x| x.rows());
        if size != cols {
            return Err(Error::InvalidCip(format!("index sets of sizes {size} and {cols}")));
        }
        MatrixFamilyPair::new(field, ColouredIndexPair::trivial(size), m, n)
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn cip(&self) -> &ColouredIndexPair {
        &self.cip
    }

    pub fn m(&self) -> &[FieldMatrix] {
        &self.m
    }

    pub fn n(&self) -> &[FieldMatrix] {
        &self.n
    }

    pub fn len(&self) -> usize {
        self.m.len()
    }

    pub fn is_empty(&self) -> bool {
        self.m.is_empty()
    }

    /// Whether `s` is invertible with `M_k S = S N_k` for every `k`.
    pub fn is_witness(&self, s: &FieldMatrix) -> bool {
        s.shape() == (self.cip.left_len(), self.cip.right_len())
            && s.is_invertible()
            && self.m.iter().zip(&self.n).all(|(a, b)| a * s == s * b)
    }
}

/// The intertwiner space `H_{M,N}`.
pub fn intertwiner_space(fam: &MatrixFamilyPair) -> Result<ModuleBasis> {
    intertwine::intertwiner_module(fam.field, fam.cip.left_len(), fam.cip.right_len(), &fam.m, &fam.n)
}

impl fmt::Display for MatrixFamilyPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "family {} {} {} mod {}",
            self.m.len(),
            self.cip.left_len(),
            self.cip.right_len(),
            self.field.modulus()
        )?;
        for sizes in [&self.cip.left, &self.cip.right] {
            let s: Vec<String> = sizes.iter().map(usize::to_string).collect();
            writeln!(f, "blocks {}", s.join(" "))?;
        }
        for m in self.m.iter().chain(&self.n) {
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

fn parse_blocks(reader: &mut LineReader) -> Result<Vec<usize>> {
    let (line, text) = reader.expect_line("`blocks` line")?;
    let mut tok = text.split_whitespace();
    if tok.next() != Some("blocks") {
        return Err(parse_err(line, "expected `blocks <sizes...>`"));
    }
    tok.map(|t| parse_usize(line, Some(t), "block size")).collect()
}

impl FromStr for MatrixFamilyPair {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut reader = LineReader::new(s);
        let (line, header) = reader.expect_line("family header")?;
        let tok: Vec<&str> = header.split_whitespace().collect();
        if tok.len() != 6 || tok[0] != "family" || tok[4] != "mod" {
            return Err(parse_err(line, "expected `family <count> <rows> <cols> mod <q>`"));
        }
        let count = parse_usize(line, Some(tok[1]), "member count")?;
        let rows = parse_usize(line, Some(tok[2]), "row count")?;
        let cols = parse_usize(line, Some(tok[3]), "column count")?;
        let field = PrimeField::new(parse_u64(line, Some(tok[5]), "modulus")?)?;
        let cip = ColouredIndexPair::from_sizes(parse_blocks(&mut reader)?, parse_blocks(&mut reader)?)?;
        if cip.left_len() != rows || cip.right_len() != cols {
            return Err(parse_err(line, "block sizes do not add up to the index set sizes"));
        }
        let mut read_side = |size: usize| -> Result<Vec<FieldMatrix>> {
            (0..count)
                .map(|_| {
                    let at = reader.line_number() + 1;
                    let m = read_matrix(&mut reader)?;
                    if m.field() != field || m.shape() != (size, size) {
                        return Err(parse_err(at, format!("expected a {size}x{size} matrix mod {}", field.modulus())));
                    }
                    Ok(m)
                })
                .collect()
        };
        let m = read_side(rows)?;
        let n = read_side(cols)?;
        if let Some((line, _)) = reader.next_line() {
            return Err(parse_err(line, "trailing input after family"));
        }
        MatrixFamilyPair::new(field, cip, m, n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_text_round_trip() {
        let f3 = PrimeField::new(3).unwrap();
        let cip = ColouredIndexPair::from_sizes(vec![1, 1], vec![1, 1]).unwrap();
        let m = vec![FieldMatrix::from_rows(f3, &[vec![1, 2], vec![0, 1]]).unwrap()];
        let n = vec![FieldMatrix::from_rows(f3, &[vec![1, 0], vec![0, 1]]).unwrap()];
        let fam = MatrixFamilyPair::new(f3, cip, m, n).unwrap();
        let text = fam.to_string();
        assert!(text.starts_with("family 1 2 2 mod 3\nblocks 1 1\nblocks 1 1\nmatrix 2 2 mod 3\n"));
        assert_eq!(text.parse::<MatrixFamilyPair>().unwrap(), fam);
    }

    #[test]
    fn cip_validation() {
        assert!(matches!(
            ColouredIndexPair::from_sizes(vec![1, 2], vec![2, 1]),
            Err(Error::InvalidCip(_))
        ));
        assert!(matches!(
            ColouredIndexPair::from_sizes(vec![3], vec![1, 2]),
            Err(Error::InvalidCip(_))
        ));
    }

    #[test]
    fn intertwiner_of_equal_families_matches_centralizer() {
        let f2 = PrimeField::new(2).unwrap();
        let a = FieldMatrix::from_rows(f2, &[vec![0, 1, 1], vec![0, 0, 1], vec![0, 0, 0]]).unwrap();
        let fam = MatrixFamilyPair::unblocked(f2, vec![a.clone()], vec![a.clone()]).unwrap();
        assert_eq!(intertwiner_space(&fam).unwrap().dim(), centralizer(f2, 3, &[a]).unwrap().dim());
    }
}
