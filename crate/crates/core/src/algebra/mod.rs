//! Group algebras, matrix algebra closure, semisimplicity and cyclic modules.

mod group;
mod idempotents;
mod module;

pub use group::{compose, invert, PermGroupGens};
pub use module::{complement, is_cyclic_module, module_closure, ModuleBasis, EXHAUSTIVE_BUDGET, RANDOM_TRIALS};

pub(crate) use module::increment;

use std::collections::HashMap;

use crate::coherent::{AlgebraBasis, StructureConstants};
use crate::error::{Error, Result};
use crate::gf::{FieldMatrix, PrimeField, Span};

/// Permutation matrix with `P e_x = e_{g(x)}`, so `P_g P_h = P_{gh}`.
pub fn permutation_matrix(field: PrimeField, g: &[usize]) -> FieldMatrix {
    let n = g.len();
    let mut m = FieldMatrix::zeros(field, n, n);
    for (x, &y) in g.iter().enumerate() {
        m.set(y, x, 1 % field.modulus());
    }
    m
}

/// One permutation matrix per group element, in enumeration order (identity first).
/// If the given action has linearly dependent permutation matrices, the left regular
/// action on the enumerated elements is used instead.
pub fn group_algebra(gens: &PermGroupGens, field: PrimeField) -> Result<AlgebraBasis> {
    let elements = gens.elements()?;
    let index: HashMap<&[usize], usize> = elements.iter().enumerate().map(|(i, g)| (g.as_slice(), i)).collect();
    let d = elements.len();
    let one = 1 % field.modulus();
    let mut table = Vec::with_capacity(d * d);
    for g in &elements {
        for h in &elements {
            let gh = compose(g, h);
            table.push(vec![(index[gh.as_slice()] as u32, one)]);
        }
    }
    let mut basis: Vec<FieldMatrix> = elements.iter().map(|g| permutation_matrix(field, g)).collect();
    let mut span = Span::new(field, gens.degree() * gens.degree());
    if !basis.iter().all(|b| span.push(b.data())) {
        basis = elements
            .iter()
            .map(|g| {
                let regular: Vec<usize> = elements.iter().map(|h| index[compose(g, h).as_slice()]).collect();
                permutation_matrix(field, &regular)
            })
            .collect();
    }
    AlgebraBasis::with_constants(field, basis, StructureConstants::from_table(d, table))
}

/// Smallest unital algebra containing the seeds. Basis: identity, independent seeds,
/// then products in discovery order.
pub fn close_under_multiplication(seeds: &[FieldMatrix], field: PrimeField) -> Result<AlgebraBasis> {
    let n = seeds.first().map_or(0, |s| s.rows());
    for s in seeds {
        if s.shape() != (n, n) {
            return Err(Error::ShapeMismatch("seeds must be square of one shape".into()));
        }
        if s.field() != field {
            return Err(Error::FieldMismatch {
                left: field.modulus(),
                right: s.field().modulus(),
            });
        }
    }
    let mut span = Span::new(field, n * n);
    let mut basis = Vec::new();
    for m in std::iter::once(FieldMatrix::identity(field, n)).chain(seeds.iter().cloned()) {
        if span.push(m.data()) {
            basis.push(m);
        }
    }
    // Products with the identity add nothing, so start after it.
    let mut done = 1;
    while done < basis.len() {
        let new = basis[done].clone();
        for i in 1..=done {
            for prod in [&new * &basis[i], &basis[i] * &new] {
                if span.push(prod.data()) {
                    basis.push(prod);
                }
            }
        }
        done += 1;
    }
    let alg = AlgebraBasis::from_matrices_unchecked(field, basis)?;
    alg.constants()?;
    Ok(alg)
}

/// Nondegeneracy of the trace form `T(x, y) = tr(L_{xy})`.
pub fn is_semisimple_commutative(alg: &AlgebraBasis) -> Result<bool> {
    let c = alg.constants()?;
    if !c.is_commutative() {
        return Err(Error::NotCommutative);
    }
    let field = alg.field();
    let d = alg.dim();
    // tr(L_{B_k}) = Σ_l c^l_{kl}
    let traces: Vec<u32> = (0..d)
        .map(|k| (0..d).fold(0, |acc, l| field.add(acc, c.get(k, l, l))))
        .collect();
    let gram = FieldMatrix::from_fn(field, d, d, |i, j| {
        c.product(i, j)
            .iter()
            .fold(0, |acc, &(k, v)| field.add(acc, field.mul(v, traces[k as usize])))
    });
    Ok(gram.rank() == d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(q: u64) -> PrimeField {
        PrimeField::new(q).unwrap()
    }

    #[test]
    fn group_algebra_examples() {
        let trivial = PermGroupGens::new(3, vec![], true).unwrap();
        let a = group_algebra(&trivial, f(2)).unwrap();
        assert_eq!(a.dim(), 1);
        assert_eq!(a.basis()[0], FieldMatrix::identity(f(2), 3));

        let z2 = group_algebra(&PermGroupGens::abelian_regular(&[2]), f(3)).unwrap();
        assert_eq!(z2.constants().unwrap().get(1, 1, 0), 1);
        assert_eq!(&z2.basis()[1] * &z2.basis()[1], z2.basis()[0]);
    }

    #[test]
    fn group_algebra_constants_match_products() {
        let gens = PermGroupGens::new(4, vec![vec![1, 2, 3, 0], vec![1, 0, 3, 2]], false).unwrap();
        let a = group_algebra(&gens, f(5)).unwrap();
        assert_eq!(a.dim(), 8);
        assert_eq!(a.n(), 8);
        let checked = AlgebraBasis::from_matrices(f(5), a.basis().to_vec()).unwrap();
        assert_eq!(checked.constants().unwrap(), a.constants().unwrap());
    }

    #[test]
    fn closure_examples() {
        let f2 = f(2);
        assert_eq!(close_under_multiplication(&[FieldMatrix::identity(f2, 3)], f2).unwrap().dim(), 1);
        let nil = FieldMatrix::from_rows(f2, &[vec![0, 1], vec![0, 0]]).unwrap();
        assert_eq!(
            close_under_multiplication(&[nil, FieldMatrix::identity(f2, 2)], f2).unwrap().dim(),
            2
        );
        let units: Vec<FieldMatrix> = (0..4)
            .map(|i| FieldMatrix::from_fn(f2, 2, 2, |r, c| (r * 2 + c == i) as u32))
            .collect();
        assert_eq!(close_under_multiplication(&units, f2).unwrap().dim(), 4);
    }

    #[test]
    fn maschke_small_cases() {
        let z2 = PermGroupGens::abelian_regular(&[2]);
        let z3 = PermGroupGens::abelian_regular(&[3]);
        assert!(is_semisimple_commutative(&group_algebra(&z2, f(3)).unwrap()).unwrap());
        assert!(!is_semisimple_commutative(&group_algebra(&z2, f(2)).unwrap()).unwrap());
        assert!(is_semisimple_commutative(&group_algebra(&z3, f(2)).unwrap()).unwrap());
    }

    #[test]
    fn noncommutative_rejected() {
        let s3 = PermGroupGens::new(3, vec![vec![1, 0, 2], vec![1, 2, 0]], false).unwrap();
        let a = group_algebra(&s3, f(5)).unwrap();
        assert_eq!(is_semisimple_commutative(&a), Err(Error::NotCommutative));
    }
}
