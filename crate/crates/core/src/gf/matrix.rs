use std::fmt;
use std::ops::{Add, Mul, Sub};

use super::field::PrimeField;
use super::linalg;
use crate::error::{Error, Result};

/// Dense row-major matrix over a prime field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldMatrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

/// Column vector over a prime field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldVector {
    field: PrimeField,
    entries: Vec<u32>,
}

impl FieldVector {
    pub fn new(field: PrimeField, entries: Vec<u32>) -> Result<Self> {
        if let Some(&bad) = entries.iter().find(|&&e| e >= field.modulus()) {
            return Err(Error::DimensionMismatch(format!(
                "entry {bad} is not a residue mod {}",
                field.modulus()
            )));
        }
        Ok(FieldVector { field, entries })
    }

    /// Reduces arbitrary integers modulo q.
    pub fn from_i64(field: PrimeField, values: &[i64]) -> Self {
        FieldVector {
            field,
            entries: values.iter().map(|&v| field.reduce(v)).collect(),
        }
    }

    pub(crate) fn from_raw(field: PrimeField, entries: Vec<u32>) -> Self {
        debug_assert!(entries.iter().all(|&e| e < field.modulus()));
        FieldVector { field, entries }
    }

    pub fn zeros(field: PrimeField, len: usize) -> Self {
        FieldVector {
            field,
            entries: vec![0; len],
        }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> u32 {
        self.entries[i]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&e| e == 0)
    }

    pub fn into_entries(self) -> Vec<u32> {
        self.entries
    }
}

impl FieldMatrix {
    pub fn new(field: PrimeField, rows: usize, cols: usize, data: Vec<u32>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(&bad) = data.iter().find(|&&e| e >= field.modulus()) {
            return Err(Error::DimensionMismatch(format!(
                "entry {bad} is not a residue mod {}",
                field.modulus()
            )));
        }
        Ok(FieldMatrix {
            field,
            rows,
            cols,
            data,
        })
    }

    pub(crate) fn from_raw(field: PrimeField, rows: usize, cols: usize, data: Vec<u32>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        FieldMatrix {
            field,
            rows,
            cols,
            data,
        }
    }

    /// Builds a matrix from rows of integers, reducing each modulo q.
    pub fn from_rows(field: PrimeField, rows: &[Vec<i64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let data = rows
            .iter()
            .flat_map(|row| row.iter().map(|&v| field.reduce(v)))
            .collect();
        Ok(FieldMatrix::from_raw(field, r, c, data))
    }

    pub fn from_fn(
        field: PrimeField,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> u32,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j) % field.modulus());
            }
        }
        FieldMatrix::from_raw(field, rows, cols, data)
    }

    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        FieldMatrix::from_raw(field, rows, cols, vec![0; rows * cols])
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = FieldMatrix::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1 % field.modulus();
        }
        m
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn data(&self) -> &[u32] {
        &self.data
    }

    pub fn into_data(self) -> Vec<u32> {
        self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v % self.field.modulus();
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&e| e == 0)
    }

    pub fn is_diagonal(&self) -> bool {
        self.is_square()
            && (0..self.rows)
                .all(|i| (0..self.cols).all(|j| i == j || self.data[i * self.cols + j] == 0))
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().filter(|&&e| e != 0).count()
    }

    /// Nonzero entries as `(row, col, value)` in row-major order.
    pub fn nonzeros(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        let cols = self.cols;
        self.data
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0)
            .map(move |(idx, &v)| (idx / cols, idx % cols, v))
    }

    pub fn trace(&self) -> u32 {
        let n = self.rows.min(self.cols);
        (0..n).fold(0, |acc, i| self.field.add(acc, self.get(i, i)))
    }

    pub fn transpose(&self) -> FieldMatrix {
        FieldMatrix::from_fn(self.field, self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn scale(&self, s: u32) -> FieldMatrix {
        let f = self.field;
        let s = s % f.modulus();
        FieldMatrix::from_raw(
            f,
            self.rows,
            self.cols,
            self.data.iter().map(|&v| f.mul(v, s)).collect(),
        )
    }

    /// `self += s * other`, entrywise.
    pub fn add_scaled(&mut self, other: &FieldMatrix, s: u32) {
        assert_eq!(self.shape(), other.shape(), "add_scaled shape mismatch");
        let f = self.field;
        if s == 0 {
            return;
        }
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            if b != 0 {
                *a = f.add(*a, f.mul(b, s));
            }
        }
    }

    pub fn checked_mul(&self, rhs: &FieldMatrix) -> Result<FieldMatrix> {
        if self.field != rhs.field {
            return Err(Error::FieldMismatch {
                left: self.field.modulus(),
                right: rhs.field.modulus(),
            });
        }
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(self.mul_unchecked(rhs))
    }

    /// Product that skips zero entries of `self`; cost is `nnz(self) * rhs.cols`.
    fn mul_unchecked(&self, rhs: &FieldMatrix) -> FieldMatrix {
        let q = self.field.modulus() as u64;
        let n = rhs.cols;
        let mut acc = vec![0u64; self.rows * n];
        // Accumulate in u64 and reduce lazily; q < 2^31 so 4 products fit before overflow risk.
        let limit = (u64::MAX / ((q - 1).max(1) * (q - 1).max(1))).min(1 << 20);
        for i in 0..self.rows {
            let out = &mut acc[i * n..(i + 1) * n];
            let mut pending = 0u64;
            for t in 0..self.cols {
                let a = self.data[i * self.cols + t] as u64;
                if a == 0 {
                    continue;
                }
                let row = &rhs.data[t * n..(t + 1) * n];
                for (o, &b) in out.iter_mut().zip(row) {
                    *o += a * b as u64;
                }
                pending += 1;
                if pending + 1 >= limit {
                    for o in out.iter_mut() {
                        *o %= q;
                    }
                    pending = 0;
                }
            }
        }
        FieldMatrix::from_raw(
            self.field,
            self.rows,
            n,
            acc.into_iter().map(|v| (v % q) as u32).collect(),
        )
    }

    pub fn mul_vec(&self, v: &FieldVector) -> Result<FieldVector> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix times vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let f = self.field;
        let out = (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v.entries())
                    .fold(0u32, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
            })
            .collect();
        Ok(FieldVector::from_raw(f, out))
    }

    pub fn rank(&self) -> usize {
        linalg::rank(self)
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    pub fn inverse(&self) -> Result<FieldMatrix> {
        linalg::inverse(self)
    }

    pub fn kernel_basis(&self) -> Vec<FieldVector> {
        linalg::kernel_basis(self)
    }

    pub fn solve(&self, b: &FieldVector) -> Result<Option<FieldVector>> {
        linalg::solve(self, b)
    }

    /// Submatrix on the given row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> FieldMatrix {
        FieldMatrix::from_fn(self.field, rows.len(), cols.len(), |i, j| {
            self.get(rows[i], cols[j])
        })
    }
}

impl Mul for &FieldMatrix {
    type Output = FieldMatrix;

    /// Panics on shape or field mismatch; use [`FieldMatrix::checked_mul`] for fallible use.
    fn mul(self, rhs: &FieldMatrix) -> FieldMatrix {
        self.checked_mul(rhs).expect("matrix product")
    }
}

impl Add for &FieldMatrix {
    type Output = FieldMatrix;

    fn add(self, rhs: &FieldMatrix) -> FieldMatrix {
        let mut out = self.clone();
        out.add_scaled(rhs, 1);
        out
    }
}

impl Sub for &FieldMatrix {
    type Output = FieldMatrix;

    fn sub(self, rhs: &FieldMatrix) -> FieldMatrix {
        let mut out = self.clone();
        out.add_scaled(rhs, self.field.modulus() - 1);
        out
    }
}

impl fmt::Display for FieldMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "matrix {} {} mod {}",
            self.rows,
            self.cols,
            self.field.modulus()
        )?;
        for r in 0..self.rows {
            let line: Vec<String> = self.row(r).iter().map(u32::to_string).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(q: u64) -> PrimeField {
        PrimeField::new(q).unwrap()
    }

    #[test]
    fn new_rejects_out_of_range_entries() {
        assert!(FieldMatrix::new(f(3), 1, 2, vec![1, 3]).is_err());
        assert!(FieldMatrix::new(f(3), 1, 2, vec![1]).is_err());
    }

    #[test]
    fn product_matches_naive() {
        let field = f(5);
        let a = FieldMatrix::from_rows(field, &[vec![1, 2, 0], vec![0, 4, 3]]).unwrap();
        let b = FieldMatrix::from_rows(field, &[vec![1, 0], vec![2, 1], vec![3, 3]]).unwrap();
        let c = &a * &b;
        assert_eq!(c, FieldMatrix::from_rows(field, &[vec![0, 2], vec![2, 3]]).unwrap());
        assert!(b.checked_mul(&b).is_err());
    }

    #[test]
    fn trace_and_transpose() {
        let m = FieldMatrix::from_rows(f(7), &[vec![1, 2], vec![3, 6]]).unwrap();
        assert_eq!(m.trace(), 0);
        assert_eq!(m.transpose().get(0, 1), 3);
    }
}
