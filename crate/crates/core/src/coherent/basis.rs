use std::fmt::Write as _;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::gf::linalg::PivotBasis;
use crate::gf::{FieldMatrix, PrimeField, Span};

/// Sparse tensor `c^k_{ij}` with `B_i B_j = Σ_k c^k_{ij} B_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureConstants {
    dim: usize,
    // table[i * dim + j] lists (k, c^k_ij) with nonzero values, k increasing.
    table: Vec<Vec<(u32, u32)>>,
}

impl StructureConstants {
    pub(crate) fn from_table(dim: usize, table: Vec<Vec<(u32, u32)>>) -> Self {
        debug_assert_eq!(table.len(), dim * dim);
        StructureConstants { dim, table }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Nonzero `(k, c^k_ij)` pairs.
    pub fn product(&self, i: usize, j: usize) -> &[(u32, u32)] {
        &self.table[i * self.dim + j]
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> u32 {
        self.product(i, j)
            .iter()
            .find(|&&(kk, _)| kk as usize == k)
            .map_or(0, |&(_, v)| v)
    }

    pub fn is_commutative(&self) -> bool {
        (0..self.dim).all(|i| (i + 1..self.dim).all(|j| self.product(i, j) == self.product(j, i)))
    }

    /// Product of two elements given by coordinates.
    pub fn multiply(&self, field: PrimeField, x: &[u32], y: &[u32]) -> Vec<u32> {
        let mut out = vec![0u32; self.dim];
        for (i, &xi) in x.iter().enumerate().filter(|(_, &v)| v != 0) {
            for (j, &yj) in y.iter().enumerate().filter(|(_, &v)| v != 0) {
                let s = field.mul(xi, yj);
                for &(k, c) in self.product(i, j) {
                    out[k as usize] = field.add(out[k as usize], field.mul(s, c));
                }
            }
        }
        out
    }

    /// Lines `<prefix> <i> <j> <k> <value>` for nonzero entries in index order.
    pub fn lines(&self, prefix: &str) -> String {
        let mut out = String::new();
        for i in 0..self.dim {
            for j in 0..self.dim {
                for &(k, v) in self.product(i, j) {
                    writeln!(out, "{prefix} {i} {j} {k} {v}").expect("write to string");
                }
            }
        }
        out
    }
}

pub(crate) fn sparse_entries(m: &FieldMatrix) -> Vec<(usize, u32)> {
    m.data()
        .iter()
        .enumerate()
        .filter(|&(_, &v)| v != 0)
        .map(|(i, &v)| (i, v))
        .collect()
}

/// An ordered basis of a matrix algebra over `F_q` acting on `F^n`.
#[derive(Clone, Debug)]
pub struct AlgebraBasis {
    field: PrimeField,
    n: usize,
    basis: Vec<FieldMatrix>,
    // For bases of disjoint 0-1 matrices: basis index per cell (u32::MAX if uncovered)
    // and one representative cell per basis element.
    partition: Option<(Vec<u32>, Vec<usize>)>,
    pivots: Option<PivotBasis>,
    span: OnceLock<Span>,
    constants: OnceLock<Result<StructureConstants>>,
}

impl PartialEq for AlgebraBasis {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.n == other.n && self.basis == other.basis
    }
}

impl AlgebraBasis {
    /// Checks shapes and linear independence, and verifies closure by computing all
    /// structure constants.
    pub fn from_matrices(field: PrimeField, basis: Vec<FieldMatrix>) -> Result<Self> {
        let alg = Self::from_matrices_unchecked(field, basis)?;
        if alg.span().dim() != alg.dim() {
            return Err(Error::DimensionMismatch("basis matrices are linearly dependent".into()));
        }
        alg.constants()?;
        Ok(alg)
    }

    /// Checks shapes only; closure is verified lazily when constants are requested.
    pub(crate) fn from_matrices_unchecked(field: PrimeField, basis: Vec<FieldMatrix>) -> Result<Self> {
        let n = basis.first().map_or(0, |b| b.rows());
        for b in &basis {
            if b.field() != field {
                return Err(Error::FieldMismatch {
                    left: field.modulus(),
                    right: b.field().modulus(),
                });
            }
            if b.shape() != (n, n) {
                return Err(Error::ShapeMismatch(format!(
                    "algebra basis mixes shapes {:?} and {:?}",
                    (n, n),
                    b.shape()
                )));
            }
        }
        Ok(AlgebraBasis {
            field,
            n,
            basis,
            partition: None,
            pivots: None,
            span: OnceLock::new(),
            constants: OnceLock::new(),
        })
    }

    /// Basis with pivot cells (basis `i` is 1 at `pivots[i]`, the others 0); closure is
    /// checked lazily.
    pub(crate) fn with_pivots(field: PrimeField, basis: Vec<FieldMatrix>, pivots: Vec<usize>) -> Result<Self> {
        let mut alg = Self::from_matrices_unchecked(field, basis)?;
        let n = alg.n;
        let entries = alg.basis.iter().map(sparse_entries).collect();
        alg.pivots = Some(
            PivotBasis::new(n * n, pivots, entries)
                .ok_or_else(|| Error::DimensionMismatch("pivot cells do not fit the basis".into()))?,
        );
        Ok(alg)
    }

    /// Shapes checked; the given constants are trusted.
    pub(crate) fn with_constants(
        field: PrimeField,
        basis: Vec<FieldMatrix>,
        constants: StructureConstants,
    ) -> Result<Self> {
        let alg = Self::from_matrices_unchecked(field, basis)?;
        alg.constants.set(Ok(constants)).expect("fresh cell");
        Ok(alg)
    }

    /// Basis of indicator matrices of the classes of a partial partition of `n x n`
    /// (`cells[r * n + c]` is the class, `u32::MAX` for uncovered cells), with known constants.
    pub(crate) fn from_partition(
        field: PrimeField,
        n: usize,
        cells: Vec<u32>,
        constants: StructureConstants,
    ) -> Self {
        let dim = constants.dim();
        let mut reps = vec![usize::MAX; dim];
        let mut data = vec![vec![0u32; n * n]; dim];
        for (cell, &c) in cells.iter().enumerate() {
            if c != u32::MAX {
                data[c as usize][cell] = 1 % field.modulus();
                if reps[c as usize] == usize::MAX {
                    reps[c as usize] = cell;
                }
            }
        }
        let basis = data
            .into_iter()
            .map(|d| FieldMatrix::from_raw(field, n, n, d))
            .collect();
        let constants_cell = OnceLock::new();
        constants_cell.set(Ok(constants)).expect("fresh cell");
        AlgebraBasis {
            field,
            n,
            basis,
            partition: Some((cells, reps)),
            pivots: None,
            span: OnceLock::new(),
            constants: constants_cell,
        }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    /// Matrix size.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[FieldMatrix] {
        &self.basis
    }

    fn span(&self) -> &Span {
        self.span.get_or_init(|| {
            let mut span = Span::new(self.field, self.n * self.n);
            for b in &self.basis {
                span.push(b.data());
            }
            span
        })
    }

    /// Coordinates of `m` in the basis, or `None` if `m` lies outside the span.
    pub fn coordinates(&self, m: &FieldMatrix) -> Option<Vec<u32>> {
        if m.shape() != (self.n, self.n) || m.field() != self.field {
            return None;
        }
        if let Some((cells, reps)) = &self.partition {
            let coords: Vec<u32> = reps.iter().map(|&r| m.data()[r]).collect();
            let ok = m.data().iter().zip(cells).all(|(&v, &c)| {
                v == if c == u32::MAX { 0 } else { coords[c as usize] }
            });
            return ok.then_some(coords);
        }
        if let Some(p) = &self.pivots {
            return p.coordinates(self.field, m.data());
        }
        if self.span().dim() != self.dim() {
            return None;
        }
        self.span().coordinates(m.data())
    }

    /// `Σ_i x_i B_i`.
    pub fn element(&self, coords: &[u32]) -> FieldMatrix {
        let mut out = FieldMatrix::zeros(self.field, self.n, self.n);
        for (b, &c) in self.basis.iter().zip(coords) {
            if c != 0 {
                out.add_scaled(b, c);
            }
        }
        out
    }

    pub fn identity_coordinates(&self) -> Option<Vec<u32>> {
        self.coordinates(&FieldMatrix::identity(self.field, self.n))
    }

    /// Structure constants, computed on first use; fails if a product leaves the span.
    pub fn constants(&self) -> Result<&StructureConstants> {
        self.constants
            .get_or_init(|| self.compute_constants())
            .as_ref()
            .map_err(Clone::clone)
    }

    fn compute_constants(&self) -> Result<StructureConstants> {
        let d = self.dim();
        let mut table = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                let prod = &self.basis[i] * &self.basis[j];
                let coords = self.coordinates(&prod).ok_or_else(|| {
                    Error::NotClosed(format!("product of basis elements {i} and {j}"))
                })?;
                table.push(
                    coords
                        .into_iter()
                        .enumerate()
                        .filter(|&(_, v)| v != 0)
                        .map(|(k, v)| (k as u32, v))
                        .collect(),
                );
            }
        }
        Ok(StructureConstants::from_table(d, table))
    }

    /// Exact check `B_i B_j = B_j B_i` by matrix products.
    pub fn is_commutative(&self) -> bool {
        if let Some(Ok(c)) = self.constants.get() {
            return c.is_commutative();
        }
        let d = self.dim();
        (0..d).all(|i| (i + 1..d).all(|j| &self.basis[i] * &self.basis[j] == &self.basis[j] * &self.basis[i]))
    }

    /// Basis matrices in the matrix format followed by `sc <i> <j> <k> <value>` lines.
    pub fn dump(&self) -> Result<String> {
        let mut out = format!("algebra {} {} mod {}\n", self.dim(), self.n, self.field.modulus());
        for b in &self.basis {
            out.push_str(&b.to_string());
        }
        out.push_str(&self.constants()?.lines("sc"));
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_of_z2() {
        let f = PrimeField::new(3).unwrap();
        let i = FieldMatrix::identity(f, 2);
        let p = FieldMatrix::from_rows(f, &[vec![0, 1], vec![1, 0]]).unwrap();
        let alg = AlgebraBasis::from_matrices(f, vec![i, p]).unwrap();
        let c = alg.constants().unwrap();
        assert_eq!(c.get(1, 1, 0), 1);
        assert_eq!(c.get(1, 1, 1), 0);
        assert!(c.is_commutative());
        assert_eq!(alg.identity_coordinates(), Some(vec![1, 0]));
        assert!(alg.dump().unwrap().ends_with("sc 1 0 1 1\nsc 1 1 0 1\n"));
    }

    #[test]
    fn non_closed_span_rejected() {
        let f = PrimeField::new(2).unwrap();
        let e12 = FieldMatrix::from_rows(f, &[vec![0, 1], vec![0, 0]]).unwrap();
        let e21 = FieldMatrix::from_rows(f, &[vec![0, 0], vec![1, 0]]).unwrap();
        assert!(matches!(
            AlgebraBasis::from_matrices(f, vec![e12, e21]),
            Err(Error::NotClosed(_))
        ));
    }
}
