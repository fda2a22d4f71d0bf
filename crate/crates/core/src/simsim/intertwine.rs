use std::collections::HashMap;

use crate::algebra::ModuleBasis;
use crate::coherent::AlgebraBasis;
use crate::error::{Error, Result};
use crate::gf::{Echelon, FieldMatrix, PrimeField};

use super::ColouredIndexPair;

const NONE: u32 = u32::MAX;

/// Basis of `{X : M_k X = X N_k for all k}` with the pivot cell of each basis element.
pub(crate) fn intertwiner(
    field: PrimeField,
    rows: usize,
    cols: usize,
    m: &[FieldMatrix],
    n: &[FieldMatrix],
) -> Result<(Vec<FieldMatrix>, Vec<usize>)> {
    if m.len() != n.len() {
        return Err(Error::DimensionMismatch(format!("{} vs {} family members", m.len(), n.len())));
    }
    for (a, b) in m.iter().zip(n) {
        if a.shape() != (rows, rows) || b.shape() != (cols, cols) {
            return Err(Error::ShapeMismatch(format!(
                "family members {:?} and {:?} for a {rows}x{cols} intertwiner",
                a.shape(),
                b.shape()
            )));
        }
        if a.field() != field || b.field() != field {
            return Err(Error::FieldMismatch {
                left: field.modulus(),
                right: if a.field() != field { a.field() } else { b.field() }.modulus(),
            });
        }
    }

    // Pairs of diagonal members force X[r][c] = 0 unless their diagonal entries agree;
    // those equations are then satisfied by every remaining unknown.
    let diagonal: Vec<bool> = m.iter().zip(n).map(|(a, b)| a.is_diagonal() && b.is_diagonal()).collect();
    let key = |mat: &[FieldMatrix], i: usize| -> Vec<u32> {
        mat.iter().zip(&diagonal).filter(|(_, &d)| d).map(|(x, _)| x.get(i, i)).collect()
    };
    let mut col_groups: HashMap<Vec<u32>, Vec<usize>> = HashMap::new();
    for c in 0..cols {
        col_groups.entry(key(n, c)).or_default().push(c);
    }
    let mut unknown = vec![NONE; rows * cols];
    let mut cells = Vec::new();
    for r in 0..rows {
        if let Some(cs) = col_groups.get(&key(m, r)) {
            for &c in cs {
                unknown[r * cols + c] = cells.len() as u32;
                cells.push(r * cols + c);
            }
        }
    }

    let mut ech = Echelon::new(field, cells.len());
    let mut terms = Vec::new();
    'members: for (k, (a, b)) in m.iter().zip(n).enumerate() {
        if diagonal[k] || ech.is_full() {
            continue;
        }
        let mut a_rows: Vec<Vec<(usize, u32)>> = vec![Vec::new(); rows];
        for (r, t, v) in a.nonzeros() {
            a_rows[r].push((t, v));
        }
        let mut b_cols: Vec<Vec<(usize, u32)>> = vec![Vec::new(); cols];
        for (t, c, v) in b.nonzeros() {
            b_cols[c].push((t, v));
        }
        for r in 0..rows {
            for c in 0..cols {
                if a_rows[r].is_empty() && b_cols[c].is_empty() {
                    continue;
                }
                terms.clear();
                for &(t, v) in &a_rows[r] {
                    let u = unknown[t * cols + c];
                    if u != NONE {
                        terms.push((u as usize, v));
                    }
                }
                for &(t, v) in &b_cols[c] {
                    let u = unknown[r * cols + t];
                    if u != NONE {
                        terms.push((u as usize, field.neg(v)));
                    }
                }
                if !terms.is_empty() {
                    ech.insert_sparse(&terms);
                    if ech.is_full() {
                        break 'members;
                    }
                }
            }
        }
    }

    let free = ech.free_columns();
    let basis = ech
        .kernel()
        .into_iter()
        .map(|v| {
            let mut data = vec![0u32; rows * cols];
            for (u, x) in v.into_iter().enumerate() {
                if x != 0 {
                    data[cells[u]] = x;
                }
            }
            FieldMatrix::from_raw(field, rows, cols, data)
        })
        .collect();
    let pivots = free.into_iter().map(|u| cells[u]).collect();
    Ok((basis, pivots))
}

pub(crate) fn intertwiner_module(
    field: PrimeField,
    rows: usize,
    cols: usize,
    m: &[FieldMatrix],
    n: &[FieldMatrix],
) -> Result<ModuleBasis> {
    let (basis, pivots) = intertwiner(field, rows, cols, m, n)?;
    ModuleBasis::with_pivots(field, rows, cols, basis, pivots)
}

/// `C_M = {Z : M_k Z = Z M_k for all k}`. With an empty family the size must be given.
pub fn centralizer(field: PrimeField, size: usize, m: &[FieldMatrix]) -> Result<AlgebraBasis> {
    let (basis, pivots) = intertwiner(field, size, size, m, m)?;
    if basis.is_empty() {
        return AlgebraBasis::from_matrices(field, basis);
    }
    AlgebraBasis::with_pivots(field, basis, pivots)
}

/// `Diag_k(S)` (or `Diag(S)` without a block): zero outside the diagonal blocks.
pub fn diag_project(s: &FieldMatrix, cip: &ColouredIndexPair, block: Option<usize>) -> Result<FieldMatrix> {
    if s.shape() != (cip.left_len(), cip.right_len()) {
        return Err(Error::ShapeMismatch(format!(
            "matrix {:?} for a coloured index pair of shape {:?}",
            s.shape(),
            (cip.left_len(), cip.right_len())
        )));
    }
    if let Some(b) = block {
        if b >= cip.blocks() {
            return Err(Error::BadBlock {
                index: b,
                blocks: cip.blocks(),
            });
        }
    }
    let mut out = FieldMatrix::zeros(s.field(), s.rows(), s.cols());
    for k in 0..cip.blocks() {
        if block.is_some_and(|b| b != k) {
            continue;
        }
        for r in cip.left_range(k) {
            for c in cip.right_range(k) {
                out.set(r, c, s.get(r, c));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(q: u64) -> PrimeField {
        PrimeField::new(q).unwrap()
    }

    #[test]
    fn identity_family_gives_everything() {
        let id = FieldMatrix::identity(f(3), 3);
        let (b, _) = intertwiner(f(3), 3, 3, &[id.clone()], &[id]).unwrap();
        assert_eq!(b.len(), 9);
    }

    #[test]
    fn swapped_diagonals() {
        let f2 = f(2);
        let m = FieldMatrix::from_rows(f2, &[vec![0, 0], vec![0, 1]]).unwrap();
        let n = FieldMatrix::from_rows(f2, &[vec![1, 0], vec![0, 0]]).unwrap();
        let (b, _) = intertwiner(f2, 2, 2, &[m], &[n]).unwrap();
        assert_eq!(b.len(), 2);
        assert!(b.iter().all(|x| x.get(0, 0) == 0 && x.get(1, 1) == 0));
    }

    #[test]
    fn matrix_units_centralize_to_scalars() {
        let f5 = f(5);
        let units: Vec<FieldMatrix> = (0..9)
            .map(|i| FieldMatrix::from_fn(f5, 3, 3, |r, c| (r * 3 + c == i) as u32))
            .collect();
        let c = centralizer(f5, 3, &units).unwrap();
        assert_eq!(c.dim(), 1);
        assert_eq!(c.basis()[0], FieldMatrix::identity(f5, 3));
    }

    #[test]
    fn centralizer_commutes_and_closes() {
        let f3 = f(3);
        let a = FieldMatrix::from_rows(f3, &[vec![1, 1, 0], vec![0, 1, 0], vec![0, 0, 2]]).unwrap();
        let c = centralizer(f3, 3, std::slice::from_ref(&a)).unwrap();
        for z in c.basis() {
            assert_eq!(&a * z, z * &a);
        }
        c.constants().unwrap();
        assert!(c.identity_coordinates().is_some());
    }

    #[test]
    fn diag_projection() {
        let f2 = f(2);
        let cip = ColouredIndexPair::from_sizes(vec![1, 2], vec![1, 2]).unwrap();
        let s = FieldMatrix::from_fn(f2, 3, 3, |_, _| 1);
        let d = diag_project(&s, &cip, None).unwrap();
        let sum = &diag_project(&s, &cip, Some(0)).unwrap() + &diag_project(&s, &cip, Some(1)).unwrap();
        assert_eq!(d, sum);
        assert_eq!(d.nnz(), 5);
        assert_eq!(diag_project(&d, &cip, None).unwrap(), d);
        assert!(matches!(diag_project(&s, &cip, Some(2)), Err(Error::BadBlock { .. })));
    }
}
