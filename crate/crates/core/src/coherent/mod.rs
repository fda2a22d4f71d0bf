//! Coherent configurations and their adjacency algebras.

mod basis;

pub use basis::{AlgebraBasis, StructureConstants};

pub(crate) use basis::sparse_entries;

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::gf::PrimeField;
use crate::structures::Structure;
use crate::wl::{wl_refine, TupleColoring};

/// A partition of `I x I` into classes `0..s`, `I = 0..size`; cell `(a, b)` has index `a * size + b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoherentConfig {
    size: usize,
    cells: Vec<u32>,
    classes: usize,
}

impl CoherentConfig {
    /// Class ids must be exactly `0..s` for some `s`.
    pub fn new(size: usize, cells: Vec<u32>) -> Result<Self> {
        if cells.len() != size * size {
            return Err(Error::ShapeMismatch(format!(
                "{} cells for a base set of size {size}",
                cells.len()
            )));
        }
        let classes = cells.iter().max().map_or(0, |&c| c as usize + 1);
        let mut used = vec![false; classes];
        cells.iter().for_each(|&c| used[c as usize] = true);
        if used.contains(&false) {
            return Err(Error::ShapeMismatch("class ids are not contiguous".into()));
        }
        Ok(CoherentConfig {
            size,
            cells,
            classes,
        })
    }

    /// The partition of `A^l x A^l` read off a coloring of `2l`-tuples.
    pub fn from_coloring(c: &TupleColoring) -> Result<Self> {
        if !c.k().is_multiple_of(2) {
            return Err(Error::ShapeMismatch("coloring arity must be even".into()));
        }
        let size = c.n().pow(c.k() as u32 / 2);
        Self::new(size, c.colors().to_vec())
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn num_classes(&self) -> usize {
        self.classes
    }

    pub fn cells(&self) -> &[u32] {
        &self.cells
    }

    pub fn class_of(&self, a: usize, b: usize) -> u32 {
        self.cells[a * self.size + b]
    }

    /// First violated condition of the definition, with a witness.
    pub fn check(&self) -> Result<()> {
        let n = self.size;
        let violation = |condition: u8, witness: String| Err(Error::NotCoherent { condition, witness });

        let mut diag = vec![None::<bool>; self.classes];
        for a in 0..n {
            for b in 0..n {
                let c = self.class_of(a, b) as usize;
                let is_diag = a == b;
                match diag[c] {
                    None => diag[c] = Some(is_diag),
                    Some(d) if d != is_diag => {
                        return violation(
                            1,
                            format!("class {c} contains ({a}, {b}) and pairs of the other kind"),
                        )
                    }
                    _ => {}
                }
            }
        }

        let mut transpose = vec![u32::MAX; self.classes];
        for a in 0..n {
            for b in 0..n {
                let c = self.class_of(a, b) as usize;
                let t = self.class_of(b, a);
                if transpose[c] == u32::MAX {
                    transpose[c] = t;
                } else if transpose[c] != t {
                    return violation(
                        2,
                        format!("transpose of class {c} meets classes {} and {t} (at ({b}, {a}))", transpose[c]),
                    );
                }
            }
        }

        let mut reference: Vec<Option<Vec<u64>>> = vec![None; self.classes];
        let mut key = Vec::with_capacity(n);
        for a in 0..n {
            for b in 0..n {
                key.clear();
                key.extend((0..n).map(|e| (self.class_of(a, e) as u64) << 32 | self.class_of(e, b) as u64));
                key.sort_unstable();
                let c = self.class_of(a, b) as usize;
                match &reference[c] {
                    None => reference[c] = Some(key.clone()),
                    Some(r) if *r != key => {
                        return violation(
                            3,
                            format!("intersection numbers of class {c} differ at ({a}, {b})"),
                        )
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }

    pub fn is_coherent(&self) -> bool {
        self.check().is_ok()
    }

    /// Intersection numbers `p^k_{ij}` counted at one representative pair per class `k`.
    pub fn intersection_numbers(&self) -> Result<StructureConstants> {
        self.check()?;
        Ok(self.constants_mod(None))
    }

    /// `c^k_{ij} = p^k_{ij} mod q`.
    pub fn structure_constants(&self, field: PrimeField) -> Result<StructureConstants> {
        self.check()?;
        Ok(self.constants_mod(Some(field)))
    }

    fn constants_mod(&self, field: Option<PrimeField>) -> StructureConstants {
        let n = self.size;
        let s = self.classes;
        let mut reps = vec![usize::MAX; s];
        for (cell, &c) in self.cells.iter().enumerate() {
            if reps[c as usize] == usize::MAX {
                reps[c as usize] = cell;
            }
        }
        let mut table: Vec<Vec<(u32, u32)>> = vec![Vec::new(); s * s];
        let mut counts: FxHashMap<(u32, u32), u32> = FxHashMap::default();
        for (k, &cell) in reps.iter().enumerate() {
            let (a, b) = (cell / n, cell % n);
            counts.clear();
            for e in 0..n {
                *counts.entry((self.class_of(a, e), self.class_of(e, b))).or_insert(0) += 1;
            }
            for (&(i, j), &v) in &counts {
                let v = field.map_or(v, |f| f.from_u64(v as u64));
                if v != 0 {
                    table[i as usize * s + j as usize].push((k as u32, v));
                }
            }
        }
        table.iter_mut().for_each(|l| l.sort_unstable());
        StructureConstants::from_table(s, table)
    }

    /// Adjacency algebra over `field`: one indicator matrix per class, in class order.
    pub fn algebra(&self, field: PrimeField) -> Result<AlgebraBasis> {
        let constants = self.structure_constants(field)?;
        Ok(AlgebraBasis::from_partition(field, self.size, self.cells.clone(), constants))
    }

    /// Computes every product `B_i B_j` over `field` and checks that it is constant on
    /// every class, i.e. lies in the span of the class indicators.
    pub fn verify_closure(&self, field: PrimeField) -> Result<()> {
        let n = self.size;
        let s = self.classes;
        let mut class_sizes = vec![0usize; s];
        self.cells.iter().for_each(|&c| class_sizes[c as usize] += 1);
        let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); s];
        for (cell, &c) in self.cells.iter().enumerate() {
            by_class[c as usize].push(cell);
        }
        let mut product: FxHashMap<(u32, usize), u32> = FxHashMap::default();
        for (i, cells_i) in by_class.iter().enumerate() {
            product.clear();
            for &cell in cells_i {
                let (a, e) = (cell / n, cell % n);
                for b in 0..n {
                    let j = self.class_of(e, b);
                    let v = product.entry((j, a * n + b)).or_insert(0);
                    *v = field.add(*v, 1);
                }
            }
            // Per (j, k): the common nonzero value and how many cells carry it.
            let mut seen: FxHashMap<(u32, u32), (u32, usize)> = FxHashMap::default();
            for (&(j, cell), &v) in &product {
                if v == 0 {
                    continue;
                }
                let k = self.cells[cell];
                let slot = seen.entry((j, k)).or_insert((v, 0));
                if slot.0 != v {
                    return Err(Error::NotClosed(format!(
                        "B_{i} B_{j} takes different values on class {k}"
                    )));
                }
                slot.1 += 1;
            }
            for (&(j, k), &(_, count)) in &seen {
                if count != class_sizes[k as usize] {
                    return Err(Error::NotClosed(format!(
                        "B_{i} B_{j} vanishes on part of class {k}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Standalone form of [`CoherentConfig::check`].
pub fn is_coherent(size: usize, cells: Vec<u32>) -> Result<()> {
    CoherentConfig::new(size, cells)?.check()
}

/// Standalone form of [`CoherentConfig::structure_constants`].
pub fn structure_constants(cc: &CoherentConfig, field: PrimeField) -> Result<StructureConstants> {
    cc.structure_constants(field)
}

/// Configuration on `A^l x A^l` given by the stable `k`-WL types of `2l`-tuples.
pub fn configuration_from_coloring(s: &Structure, l: usize, k: usize) -> Result<CoherentConfig> {
    if l == 0 || 3 * l > k {
        return Err(Error::ShapeMismatch(format!(
            "{}-tuple configurations need at least {} WL dimensions",
            2 * l,
            3 * l.max(1)
        )));
    }
    let c = wl_refine(s, k)?.restrict(2 * l);
    CoherentConfig::from_coloring(&c)
}

/// The standard basis of `Alg[A; l; C^k; F]`, in canonical class order.
pub fn algebra_from_coloring(s: &Structure, l: usize, k: usize, field: PrimeField) -> Result<AlgebraBasis> {
    configuration_from_coloring(s, l, k)?.algebra(field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FieldMatrix;
    use crate::structures::{CfiStructure, OrderedGraph, SimpleGraph};

    fn f(q: u64) -> PrimeField {
        PrimeField::new(q).unwrap()
    }

    #[test]
    fn merging_diagonal_with_off_diagonal_fails_condition_one() {
        assert!(matches!(
            is_coherent(2, vec![0, 0, 1, 0]),
            Err(Error::NotCoherent { condition: 1, .. })
        ));
        assert!(is_coherent(2, vec![0, 1, 1, 0]).is_ok());
    }

    #[test]
    fn singleton_structure() {
        let alg = algebra_from_coloring(&Structure::new(1), 1, 3, f(2)).unwrap();
        assert_eq!(alg.dim(), 1);
        assert_eq!(alg.basis()[0], FieldMatrix::identity(f(2), 1));
        assert_eq!(alg.constants().unwrap().get(0, 0, 0), 1);
    }

    #[test]
    fn wl_and_orbit_configurations_are_coherent() {
        let s = CfiStructure::build(OrderedGraph::catalog("K4").unwrap(), 2, &[0; 4]).unwrap();
        let orbits = CoherentConfig::from_coloring(&s.orbit_partition(2).unwrap()).unwrap();
        orbits.check().unwrap();
        let wl = configuration_from_coloring(&s.to_structure(), 1, 3).unwrap();
        wl.check().unwrap();
        for q in [2, 3, 5] {
            wl.verify_closure(f(q)).unwrap();
        }
    }

    #[test]
    fn basis_sums_to_all_ones_and_diagonals_to_identity() {
        let s = Structure::from_graph(&SimpleGraph::path(4));
        let alg = algebra_from_coloring(&s, 1, 3, f(3)).unwrap();
        let mut total = FieldMatrix::zeros(f(3), 4, 4);
        let mut diag = FieldMatrix::zeros(f(3), 4, 4);
        for b in alg.basis() {
            total.add_scaled(b, 1);
            if b.is_diagonal() {
                diag.add_scaled(b, 1);
            }
        }
        assert!(total.data().iter().all(|&x| x == 1));
        assert_eq!(diag, FieldMatrix::identity(f(3), 4));
    }

    #[test]
    fn constants_reconstruct_products() {
        let s = Structure::from_graph(&SimpleGraph::cycle(5));
        let alg = algebra_from_coloring(&s, 1, 3, f(5)).unwrap();
        let c = alg.constants().unwrap().clone();
        for i in 0..alg.dim() {
            for j in 0..alg.dim() {
                let prod = &alg.basis()[i] * &alg.basis()[j];
                let mut expect = vec![0; alg.dim()];
                for &(k, v) in c.product(i, j) {
                    expect[k as usize] = v;
                }
                assert_eq!(prod, alg.element(&expect));
            }
        }
    }
}
