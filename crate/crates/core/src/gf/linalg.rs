//! Gauss-Jordan elimination over prime fields.
//!
//! Pivots are chosen as the first nonzero entry scanning rows top-down in the
//! current column; exact arithmetic needs no pivoting heuristics.

use super::field::PrimeField;
use super::matrix::{FieldMatrix, FieldVector};
use crate::error::{Error, Result};

/// `dst -= factor * src`, entrywise.
#[inline]
pub(crate) fn axpy_neg(field: PrimeField, dst: &mut [u32], src: &[u32], factor: u32) {
    if factor == 0 {
        return;
    }
    let q = field.modulus();
    let neg = (q - factor) as u64;
    let qq = q as u64;
    for (d, &s) in dst.iter_mut().zip(src) {
        if s != 0 {
            *d = ((*d as u64 + neg * s as u64) % qq) as u32;
        }
    }
}

#[inline]
pub(crate) fn scale_in_place(field: PrimeField, v: &mut [u32], s: u32) {
    if s == 1 {
        return;
    }
    for x in v.iter_mut() {
        *x = field.mul(*x, s);
    }
}

/// Reduces `data` (row-major, `rows x cols`) to reduced row echelon form in place.
/// Pivots are only sought in the first `pivot_cols` columns. Returns the pivot columns,
/// one per nonzero row, in order.
pub(crate) fn rref_in_place(
    field: PrimeField,
    data: &mut [u32],
    rows: usize,
    cols: usize,
    pivot_cols: usize,
) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..pivot_cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| data[i * cols + c] != 0) else {
            continue;
        };
        if p != r {
            for j in 0..cols {
                data.swap(p * cols + j, r * cols + j);
            }
        }
        let inv = field.inv(data[r * cols + c]).expect("nonzero pivot");
        scale_in_place(field, &mut data[r * cols..(r + 1) * cols], inv);
        let pivot_row: Vec<u32> = data[r * cols..(r + 1) * cols].to_vec();
        for i in 0..rows {
            if i != r {
                let factor = data[i * cols + c];
                if factor != 0 {
                    axpy_neg(field, &mut data[i * cols..(i + 1) * cols], &pivot_row, factor);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub(crate) fn rank(m: &FieldMatrix) -> usize {
    // Sparse 0-1 class matrices dominate the workload: compress to the nonzero
    // rows and columns before eliminating.
    let nz_rows: Vec<usize> = (0..m.rows()).filter(|&r| m.row(r).iter().any(|&v| v != 0)).collect();
    if nz_rows.is_empty() {
        return 0;
    }
    let mut col_used = vec![false; m.cols()];
    for &r in &nz_rows {
        for (c, &v) in m.row(r).iter().enumerate() {
            if v != 0 {
                col_used[c] = true;
            }
        }
    }
    let nz_cols: Vec<usize> = (0..m.cols()).filter(|&c| col_used[c]).collect();
    let (rows, cols) = if nz_rows.len() > nz_cols.len() {
        // Eliminate on the transpose so the pivot loop runs over the short side.
        (nz_cols.len(), nz_rows.len())
    } else {
        (nz_rows.len(), nz_cols.len())
    };
    let mut data = Vec::with_capacity(rows * cols);
    if nz_rows.len() > nz_cols.len() {
        for &c in &nz_cols {
            data.extend(nz_rows.iter().map(|&r| m.get(r, c)));
        }
    } else {
        for &r in &nz_rows {
            data.extend(nz_cols.iter().map(|&c| m.get(r, c)));
        }
    }
    rref_in_place(m.field(), &mut data, rows, cols, cols).len()
}

pub(crate) fn inverse(m: &FieldMatrix) -> Result<FieldMatrix> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "inverse of non-square {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    let w = 2 * n;
    let mut data = vec![0u32; n * w];
    for i in 0..n {
        data[i * w..i * w + n].copy_from_slice(m.row(i));
        data[i * w + n + i] = 1 % m.field().modulus();
    }
    let pivots = rref_in_place(m.field(), &mut data, n, w, n);
    if pivots.len() < n {
        return Err(Error::SingularMatrix);
    }
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        out.extend_from_slice(&data[i * w + n..(i + 1) * w]);
    }
    Ok(FieldMatrix::from_raw(m.field(), n, n, out))
}

/// Kernel vectors read off a reduced row echelon form, one per free column.
fn kernel_from_rref(
    field: PrimeField,
    data: &[u32],
    cols: usize,
    stride: usize,
    pivots: &[usize],
) -> Vec<Vec<u32>> {
    let mut is_pivot = vec![false; cols];
    for &p in pivots {
        is_pivot[p] = true;
    }
    let mut basis = Vec::new();
    for free in (0..cols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![0u32; cols];
        v[free] = 1 % field.modulus();
        for (r, &p) in pivots.iter().enumerate() {
            v[p] = field.neg(data[r * stride + free]);
        }
        basis.push(v);
    }
    basis
}

pub(crate) fn kernel_basis(m: &FieldMatrix) -> Vec<FieldVector> {
    let field = m.field();
    let mut data = m.data().to_vec();
    let pivots = rref_in_place(field, &mut data, m.rows(), m.cols(), m.cols());
    kernel_from_rref(field, &data, m.cols(), m.cols(), &pivots)
        .into_iter()
        .map(|v| FieldVector::from_raw(field, v))
        .collect()
}

pub(crate) fn solve(m: &FieldMatrix, b: &FieldVector) -> Result<Option<FieldVector>> {
    if b.len() != m.rows() {
        return Err(Error::DimensionMismatch(format!(
            "right-hand side of length {} for {} equations",
            b.len(),
            m.rows()
        )));
    }
    if b.field() != m.field() {
        return Err(Error::FieldMismatch {
            left: m.field().modulus(),
            right: b.field().modulus(),
        });
    }
    let field = m.field();
    let (rows, cols) = m.shape();
    let w = cols + 1;
    let mut data = vec![0u32; rows * w];
    for i in 0..rows {
        data[i * w..i * w + cols].copy_from_slice(m.row(i));
        data[i * w + cols] = b.get(i);
    }
    let pivots = rref_in_place(field, &mut data, rows, w, cols);
    // Inconsistent iff some row below the pivots keeps a nonzero right-hand side.
    if (pivots.len()..rows).any(|r| data[r * w + cols] != 0) {
        return Ok(None);
    }
    let mut x = vec![0u32; cols];
    for (r, &p) in pivots.iter().enumerate() {
        x[p] = data[r * w + cols];
    }
    Ok(Some(FieldVector::from_raw(field, x)))
}

/// Incrementally maintained reduced row echelon form.
///
/// Rows are dense over `ncols` columns. Every stored row has a leading 1 at its
/// pivot column and zeros at all other pivot columns.
#[derive(Clone, Debug)]
pub struct Echelon {
    field: PrimeField,
    ncols: usize,
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
    pivot_row: Vec<usize>,
}

const NO_PIVOT: usize = usize::MAX;

impl Echelon {
    pub fn new(field: PrimeField, ncols: usize) -> Self {
        Echelon {
            field,
            ncols,
            rows: Vec::new(),
            pivots: Vec::new(),
            pivot_row: vec![NO_PIVOT; ncols],
        }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.ncols
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    /// Reduces `v` against the stored rows; afterwards `v` is zero at every pivot column.
    pub fn reduce(&self, v: &mut [u32]) {
        for (r, &p) in self.pivots.iter().enumerate() {
            let factor = v[p];
            if factor != 0 {
                axpy_neg(self.field, v, &self.rows[r], factor);
            }
        }
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|&x| x == 0)
    }

    /// Inserts a dense row; returns whether it was independent of the stored rows.
    pub fn insert(&mut self, mut v: Vec<u32>) -> bool {
        debug_assert_eq!(v.len(), self.ncols);
        self.reduce(&mut v);
        self.push_reduced(v)
    }

    /// Inserts a sparse row given as `(column, value)` pairs (values already reduced mod q,
    /// duplicates allowed and summed).
    pub fn insert_sparse(&mut self, entries: &[(usize, u32)]) -> bool {
        if self.is_full() {
            return false;
        }
        let f = self.field;
        let mut v = vec![0u32; self.ncols];
        for &(c, x) in entries {
            v[c] = f.add(v[c], x);
        }
        // Only the pivot columns present in the sparse pattern need elimination:
        // stored rows vanish on the other pivot columns.
        let mut touched: Vec<usize> = entries
            .iter()
            .map(|&(c, _)| c)
            .filter(|&c| self.pivot_row[c] != NO_PIVOT)
            .collect();
        touched.sort_unstable();
        touched.dedup();
        for c in touched {
            let factor = v[c];
            if factor != 0 {
                let r = self.pivot_row[c];
                axpy_neg(f, &mut v, &self.rows[r], factor);
            }
        }
        self.push_reduced(v)
    }

    fn push_reduced(&mut self, mut v: Vec<u32>) -> bool {
        let Some(p) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = self.field.inv(v[p]).expect("nonzero");
        scale_in_place(self.field, &mut v, inv);
        for row in self.rows.iter_mut() {
            let factor = row[p];
            if factor != 0 {
                axpy_neg(self.field, row, &v, factor);
            }
        }
        self.pivot_row[p] = self.rows.len();
        self.rows.push(v);
        self.pivots.push(p);
        true
    }

    /// Non-pivot columns in increasing order; [`Echelon::kernel`] has one vector per entry.
    pub fn free_columns(&self) -> Vec<usize> {
        (0..self.ncols).filter(|&c| self.pivot_row[c] == NO_PIVOT).collect()
    }

    /// Basis of `{x : r . x = 0 for every stored row r}`.
    pub fn kernel(&self) -> Vec<Vec<u32>> {
        let f = self.field;
        let mut basis = Vec::new();
        for free in (0..self.ncols).filter(|&c| self.pivot_row[c] == NO_PIVOT) {
            let mut v = vec![0u32; self.ncols];
            v[free] = 1 % f.modulus();
            for (r, &p) in self.pivots.iter().enumerate() {
                v[p] = f.neg(self.rows[r][free]);
            }
            basis.push(v);
        }
        basis
    }
}

/// A subspace spanned by an ordered list of vectors, with exact coordinates.
///
/// Coordinates are expressed against the vectors in insertion order; dependent
/// vectors are rejected on insertion.
#[derive(Clone, Debug)]
pub struct Span {
    echelon: Echelon,
    // combos[r] expresses echelon row r in terms of the original vectors.
    combos: Vec<Vec<u32>>,
    dim: usize,
}

impl Span {
    pub fn new(field: PrimeField, ncols: usize) -> Self {
        Span {
            echelon: Echelon::new(field, ncols),
            combos: Vec::new(),
            dim: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ncols(&self) -> usize {
        self.echelon.ncols
    }

    /// Adds `v` if it is independent of the span; returns whether it was added.
    pub fn push(&mut self, v: &[u32]) -> bool {
        let f = self.echelon.field;
        let mut w = v.to_vec();
        // Track how w is built from the originals while reducing.
        let mut combo = vec![0u32; self.dim + 1];
        combo[self.dim] = 1 % f.modulus();
        for (r, &p) in self.echelon.pivots.iter().enumerate() {
            let factor = w[p];
            if factor != 0 {
                axpy_neg(f, &mut w, &self.echelon.rows[r], factor);
                let neg = f.neg(factor);
                for (c, &x) in combo.iter_mut().zip(&self.combos[r]) {
                    *c = f.add(*c, f.mul(neg, x));
                }
            }
        }
        let Some(p) = w.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = f.inv(w[p]).expect("nonzero");
        scale_in_place(f, &mut w, inv);
        scale_in_place(f, &mut combo, inv);
        for c in self.combos.iter_mut() {
            c.push(0);
        }
        for r in 0..self.echelon.rows.len() {
            let factor = self.echelon.rows[r][p];
            if factor != 0 {
                let (row, combo_r) = (&mut self.echelon.rows[r], &mut self.combos[r]);
                axpy_neg(f, row, &w, factor);
                axpy_neg(f, combo_r, &combo, factor);
            }
        }
        self.echelon.pivot_row[p] = self.echelon.rows.len();
        self.echelon.rows.push(w);
        self.echelon.pivots.push(p);
        self.combos.push(combo);
        self.dim += 1;
        true
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        self.echelon.contains(v)
    }

    /// Coordinates of `v` against the inserted vectors, or `None` if `v` is outside the span.
    pub fn coordinates(&self, v: &[u32]) -> Option<Vec<u32>> {
        let f = self.echelon.field;
        let mut w = v.to_vec();
        let mut coords = vec![0u32; self.dim];
        for (r, &p) in self.echelon.pivots.iter().enumerate() {
            let factor = w[p];
            if factor != 0 {
                axpy_neg(f, &mut w, &self.echelon.rows[r], factor);
                for (c, &x) in coords.iter_mut().zip(&self.combos[r]) {
                    *c = f.add(*c, f.mul(factor, x));
                }
            }
        }
        w.iter().all(|&x| x == 0).then_some(coords)
    }
}

/// Sparse basis in which vector `i` is 1 at `pivots[i]` and every other vector is 0 there,
/// so coordinates are read off the pivot entries.
#[derive(Clone, Debug)]
pub(crate) struct PivotBasis {
    len: usize,
    pivots: Vec<usize>,
    entries: Vec<Vec<(usize, u32)>>,
}

impl PivotBasis {
    /// `None` if the pivot property fails.
    pub(crate) fn new(len: usize, pivots: Vec<usize>, entries: Vec<Vec<(usize, u32)>>) -> Option<Self> {
        let mut at_pivot = vec![usize::MAX; len];
        for (i, &p) in pivots.iter().enumerate() {
            at_pivot[p] = i;
        }
        for (i, e) in entries.iter().enumerate() {
            let ok = e.iter().all(|&(c, v)| {
                let j = at_pivot[c];
                j == usize::MAX || (j == i) == (v != 0) && (j != i || v == 1)
            }) && e.iter().any(|&(c, _)| c == pivots[i]);
            if !ok {
                return None;
            }
        }
        Some(PivotBasis { len, pivots, entries })
    }

    /// Exact: `None` unless `v` equals the combination read off the pivots.
    pub(crate) fn coordinates(&self, field: PrimeField, v: &[u32]) -> Option<Vec<u32>> {
        if v.len() != self.len {
            return None;
        }
        let coords: Vec<u32> = self.pivots.iter().map(|&p| v[p]).collect();
        let mut acc = vec![0u32; self.len];
        for (e, &c) in self.entries.iter().zip(&coords) {
            if c != 0 {
                for &(cell, x) in e {
                    acc[cell] = field.add(acc[cell], field.mul(c, x));
                }
            }
        }
        (acc == v).then_some(coords)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(q: u64) -> PrimeField {
        PrimeField::new(q).unwrap()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(FieldMatrix::identity(f(2), 3).rank(), 3);
        assert_eq!(FieldMatrix::zeros(f(5), 2, 2).rank(), 0);
        let m = FieldMatrix::from_rows(f(5), &[vec![1, 2], vec![2, 4]]).unwrap();
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn solve_examples() {
        let m = FieldMatrix::from_rows(f(3), &[vec![1]]).unwrap();
        let b = FieldVector::from_i64(f(3), &[2]);
        assert_eq!(m.solve(&b).unwrap().unwrap().entries(), &[2]);
        let z = FieldMatrix::from_rows(f(3), &[vec![0]]).unwrap();
        let one = FieldVector::from_i64(f(3), &[1]);
        assert_eq!(z.solve(&one).unwrap(), None);
        let k = FieldMatrix::from_rows(f(2), &[vec![1, 1]]).unwrap().kernel_basis();
        assert_eq!(k.len(), 1);
        assert_eq!(k[0].entries(), &[1, 1]);
    }

    #[test]
    fn solve_rejects_dimension_mismatch() {
        let m = FieldMatrix::identity(f(3), 2);
        let b = FieldVector::zeros(f(3), 3);
        assert!(matches!(m.solve(&b), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn inverse_examples() {
        let field = f(2);
        let id = FieldMatrix::identity(field, 3);
        assert_eq!(id.inverse().unwrap(), id);
        let swap = FieldMatrix::from_rows(field, &[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(swap.inverse().unwrap(), swap);
        let ones = FieldMatrix::from_rows(field, &[vec![1, 1], vec![1, 1]]).unwrap();
        assert_eq!(ones.inverse(), Err(Error::SingularMatrix));
    }

    #[test]
    fn echelon_sparse_and_dense_agree() {
        let field = f(3);
        let mut a = Echelon::new(field, 4);
        let mut b = Echelon::new(field, 4);
        let rows = [vec![1, 2, 0, 1], vec![2, 1, 0, 2], vec![0, 0, 1, 1]];
        for r in &rows {
            a.insert(r.clone());
            let sparse: Vec<(usize, u32)> =
                r.iter().enumerate().filter(|(_, &v)| v != 0).map(|(c, &v)| (c, v)).collect();
            b.insert_sparse(&sparse);
        }
        assert_eq!(a.rank(), 2);
        assert_eq!(a.rows(), b.rows());
        for k in a.kernel() {
            for r in &rows {
                let dot = r.iter().zip(&k).fold(0, |acc, (&x, &y)| field.add(acc, field.mul(x, y)));
                assert_eq!(dot, 0);
            }
        }
    }

    #[test]
    fn span_coordinates_reconstruct() {
        let field = f(5);
        let mut s = Span::new(field, 3);
        assert!(s.push(&[1, 2, 3]));
        assert!(s.push(&[0, 1, 4]));
        assert!(!s.push(&[1, 3, 2]));
        let c = s.coordinates(&[2, 0, 0]).unwrap();
        // 2*(1,2,3) + 1*(0,1,4)
        assert_eq!(c[0], 2);
        assert_eq!(field.add(4, c[1]), 0);
        assert!(s.coordinates(&[0, 0, 1]).is_none());
    }
}
