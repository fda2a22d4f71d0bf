use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::idempotents::{primitive_idempotents, Commutative};
use crate::coherent::{sparse_entries, AlgebraBasis};
use crate::error::{Error, Result};
use crate::gf::linalg::PivotBasis;
use crate::gf::{FieldMatrix, PrimeField, Span};

/// Exhaustive generator search runs when `q^d` is at most this.
pub const EXHAUSTIVE_BUDGET: u128 = 1 << 20;
/// Random candidates tried before giving up.
pub const RANDOM_TRIALS: usize = 256;

/// A subspace of `rows x cols` matrices, closed under left multiplication by an algebra.
#[derive(Clone, Debug)]
pub struct ModuleBasis {
    field: PrimeField,
    rows: usize,
    cols: usize,
    basis: Vec<FieldMatrix>,
    span: Option<Span>,
    pivots: Option<PivotBasis>,
}

impl PartialEq for ModuleBasis {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.shape() == other.shape() && self.basis == other.basis
    }
}

impl ModuleBasis {
    /// Linearly independent matrices of one shape. Closure is not checked here; see
    /// [`ModuleBasis::action_constants`].
    pub fn new(field: PrimeField, rows: usize, cols: usize, basis: Vec<FieldMatrix>) -> Result<Self> {
        let mut span = Span::new(field, rows * cols);
        for b in &basis {
            if b.field() != field {
                return Err(Error::FieldMismatch {
                    left: field.modulus(),
                    right: b.field().modulus(),
                });
            }
            if b.shape() != (rows, cols) {
                return Err(Error::ShapeMismatch(format!(
                    "module element of shape {:?}, expected {:?}",
                    b.shape(),
                    (rows, cols)
                )));
            }
            if !span.push(b.data()) {
                return Err(Error::DimensionMismatch("module basis is linearly dependent".into()));
            }
        }
        Ok(ModuleBasis {
            field,
            rows,
            cols,
            basis,
            span: Some(span),
            pivots: None,
        })
    }

    /// Basis with pivot cells as produced by a kernel computation.
    pub(crate) fn with_pivots(
        field: PrimeField,
        rows: usize,
        cols: usize,
        basis: Vec<FieldMatrix>,
        pivots: Vec<usize>,
    ) -> Result<Self> {
        let entries = basis.iter().map(sparse_entries).collect();
        let pivots = PivotBasis::new(rows * cols, pivots, entries)
            .ok_or_else(|| Error::DimensionMismatch("pivot cells do not fit the basis".into()))?;
        Ok(ModuleBasis {
            field,
            rows,
            cols,
            basis,
            span: None,
            pivots: Some(pivots),
        })
    }

    pub fn zero(field: PrimeField, rows: usize, cols: usize) -> Self {
        ModuleBasis::new(field, rows, cols, Vec::new()).expect("empty basis")
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[FieldMatrix] {
        &self.basis
    }

    pub fn contains(&self, m: &FieldMatrix) -> bool {
        self.coordinates(m).is_some()
    }

    pub fn coordinates(&self, m: &FieldMatrix) -> Option<Vec<u32>> {
        if m.shape() != self.shape() || m.field() != self.field {
            return None;
        }
        match (&self.pivots, &self.span) {
            (Some(p), _) => p.coordinates(self.field, m.data()),
            (None, Some(s)) => s.coordinates(m.data()),
            (None, None) => unreachable!("module without coordinates"),
        }
    }

    pub fn element(&self, coords: &[u32]) -> FieldMatrix {
        let mut out = FieldMatrix::zeros(self.field, self.rows, self.cols);
        for (b, &c) in self.basis.iter().zip(coords) {
            if c != 0 {
                out.add_scaled(b, c);
            }
        }
        out
    }

    /// One `d x d` matrix per algebra basis element `B_i`; column `j` holds the coordinates
    /// of `B_i H_j`. Fails if some product leaves the module.
    pub fn action_constants(&self, alg: &AlgebraBasis) -> Result<Vec<FieldMatrix>> {
        check_shapes(alg, self.rows)?;
        let d = self.dim();
        alg.basis()
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let mut a = FieldMatrix::zeros(self.field, d, d);
                for (j, h) in self.basis.iter().enumerate() {
                    let coords = self.coordinates(&(b * h)).ok_or_else(|| {
                        Error::NotClosed(format!("algebra element {i} times module element {j}"))
                    })?;
                    for (r, v) in coords.into_iter().enumerate() {
                        a.set(r, j, v);
                    }
                }
                Ok(a)
            })
            .collect()
    }
}

fn check_shapes(alg: &AlgebraBasis, rows: usize) -> Result<()> {
    if alg.dim() > 0 && alg.n() != rows {
        return Err(Error::ShapeMismatch(format!(
            "algebra acts on {} rows, module has {rows}",
            alg.n()
        )));
    }
    Ok(())
}

/// Smallest subspace containing `seeds` and closed under left multiplication by `alg`.
/// Basis order: independent seeds first, then products in discovery order.
pub fn module_closure(alg: &AlgebraBasis, seeds: &[FieldMatrix]) -> Result<ModuleBasis> {
    let field = alg.field();
    let Some(first) = seeds.first() else {
        return Ok(ModuleBasis::zero(field, alg.n(), 0));
    };
    let (rows, cols) = first.shape();
    check_shapes(alg, rows)?;
    let mut span = Span::new(field, rows * cols);
    let mut basis = Vec::new();
    for s in seeds {
        if s.shape() != (rows, cols) {
            return Err(Error::ShapeMismatch("seeds of different shapes".into()));
        }
        if s.field() != field {
            return Err(Error::FieldMismatch {
                left: field.modulus(),
                right: s.field().modulus(),
            });
        }
        if span.push(s.data()) {
            basis.push(s.clone());
        }
    }
    let mut head = 0;
    while head < basis.len() {
        for b in alg.basis() {
            let prod = b * &basis[head];
            if span.push(prod.data()) {
                basis.push(prod);
            }
        }
        head += 1;
    }
    Ok(ModuleBasis {
        field,
        rows,
        cols,
        basis,
        span: Some(span),
        pivots: None,
    })
}

/// A generator of `module` over `alg`, or `None` if the module is not cyclic.
///
/// Commutative unital algebras are decided by splitting into local components; other
/// algebras go through exhaustive search when `q^d <= 2^20`, then seeded random search.
/// Returned generators are re-verified against the exact action constants.
pub fn is_cyclic_module(alg: &AlgebraBasis, module: &ModuleBasis, seed: u64) -> Result<Option<FieldMatrix>> {
    check_shapes(alg, module.rows)?;
    let d = module.dim();
    if d == 0 {
        return Ok(Some(FieldMatrix::zeros(module.field, module.rows, module.cols)));
    }
    let unital = alg.dim() > 0 && alg.identity_coordinates().is_some();
    if unital && d > alg.dim() {
        return Ok(None);
    }
    let action = Action::new(module.field, module.action_constants(alg)?);
    let found = match Commutative::new(alg) {
        Ok(comm) => commutative_generator(&comm, &action, alg.dim()),
        Err(Error::NotCommutative | Error::NotClosed(_)) => search_generator(&action, seed)?,
        Err(e) => return Err(e),
    };
    match found {
        Some(g) if action.generates(&g) => Ok(Some(module.element(&g))),
        Some(_) => Err(Error::NotClosed("generator failed re-verification".into())),
        None => Ok(None),
    }
}

/// Algebra basis elements acting on module coordinates.
struct Action {
    field: PrimeField,
    d: usize,
    mats: Vec<FieldMatrix>,
}

impl Action {
    fn new(field: PrimeField, mats: Vec<FieldMatrix>) -> Self {
        let d = mats.first().map_or(0, |m| m.rows());
        Action { field, d, mats }
    }

    /// Matrix of the algebra element with coordinates `x`.
    fn of(&self, x: &[u32]) -> FieldMatrix {
        let mut out = FieldMatrix::zeros(self.field, self.d, self.d);
        for (m, &c) in self.mats.iter().zip(x) {
            if c != 0 {
                out.add_scaled(m, c);
            }
        }
        out
    }

    fn apply(&self, m: &FieldMatrix, v: &[u32]) -> Vec<u32> {
        let f = self.field;
        (0..self.d)
            .map(|r| {
                m.row(r)
                    .iter()
                    .zip(v)
                    .fold(0, |acc, (&a, &b)| if a == 0 || b == 0 { acc } else { f.add(acc, f.mul(a, b)) })
            })
            .collect()
    }

    fn generates(&self, g: &[u32]) -> bool {
        let mut span = Span::new(self.field, self.d);
        span.push(g);
        for m in &self.mats {
            span.push(&self.apply(m, g));
            if span.dim() == self.d {
                return true;
            }
        }
        span.dim() == self.d
    }
}

fn column(m: &FieldMatrix, j: usize) -> Vec<u32> {
    (0..m.rows()).map(|r| m.get(r, j)).collect()
}

/// Exact: each local component `eC` must act on `eH / e(JH)` through a space of dimension
/// at most that of its residue field.
fn commutative_generator(comm: &Commutative, action: &Action, alg_dim: usize) -> Option<Vec<u32>> {
    let field = action.field;
    let d = action.d;
    let radical = comm.nilradical();
    let mut jh = Span::new(field, d);
    let mut jh_basis = Vec::new();
    for r in &radical {
        let l = action.of(r);
        for j in 0..d {
            let v = column(&l, j);
            if jh.push(&v) {
                jh_basis.push(v);
            }
        }
    }
    let units: Vec<Vec<u32>> = (0..alg_dim)
        .map(|i| {
            let mut u = vec![0; alg_dim];
            u[i] = 1;
            u
        })
        .collect();
    let mut generator = vec![0u32; d];
    for e in comm.primitive_idempotents() {
        let mut ec = Span::new(field, alg_dim);
        units.iter().for_each(|u| {
            ec.push(&comm.mul(&e, u));
        });
        let mut ej = Span::new(field, alg_dim);
        radical.iter().for_each(|r| {
            ej.push(&comm.mul(&e, r));
        });
        let residue_dim = ec.dim() - ej.dim();
        let le = action.of(&e);
        let mut top = Span::new(field, d);
        jh_basis.iter().for_each(|v| {
            top.push(&action.apply(&le, v));
        });
        let below = top.dim();
        let mut pick = None;
        for j in 0..d {
            let v = column(&le, j);
            if top.push(&v) && pick.is_none() {
                pick = Some(v);
            }
        }
        if top.dim() - below > residue_dim {
            return None;
        }
        if let Some(v) = pick {
            for (g, x) in generator.iter_mut().zip(v) {
                *g = field.add(*g, x);
            }
        }
    }
    Some(generator)
}

fn search_generator(action: &Action, seed: u64) -> Result<Option<Vec<u32>>> {
    let field = action.field;
    let q = field.modulus() as u128;
    let d = action.d;
    let total = q.checked_pow(d as u32);
    if let Some(total) = total.filter(|&t| t <= EXHAUSTIVE_BUDGET) {
        let mut c = vec![0u32; d];
        for _ in 1..total {
            increment(&mut c, field.modulus());
            if action.generates(&c) {
                return Ok(Some(c));
            }
        }
        return Ok(None);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RANDOM_TRIALS {
        let c: Vec<u32> = (0..d).map(|_| rng.gen_range(0..field.modulus())).collect();
        if action.generates(&c) {
            return Ok(Some(c));
        }
    }
    Err(Error::BudgetExceeded {
        what: "cyclic generator search".into(),
        required: total.unwrap_or(u128::MAX),
        budget: EXHAUSTIVE_BUDGET,
    })
}


/// Little-endian counter over `F_q^d`.
pub(crate) fn increment(c: &mut [u32], q: u32) {
    for x in c.iter_mut() {
        *x += 1;
        if *x < q {
            return;
        }
        *x = 0;
    }
}

/// A submodule `U` with `sub ⊕ U = module`, built per local component of a commutative
/// semisimple algebra; `None` if some step fails to produce a direct complement.
pub fn complement(alg: &AlgebraBasis, module: &ModuleBasis, sub: &ModuleBasis) -> Result<Option<ModuleBasis>> {
    let field = alg.field();
    let len = module.rows * module.cols;
    let mut total = Span::new(field, len);
    for s in sub.basis() {
        if !module.contains(s) {
            return Ok(None);
        }
        total.push(s.data());
    }
    let mut seeds = Vec::new();
    for e in primitive_idempotents(alg)? {
        for h in module.basis() {
            let v = &e * h;
            if !total.contains(v.data()) {
                let orbit = module_closure(alg, std::slice::from_ref(&v))?;
                for b in orbit.basis() {
                    total.push(b.data());
                }
                seeds.push(v);
            }
        }
    }
    let u = if seeds.is_empty() {
        ModuleBasis::zero(field, module.rows, module.cols)
    } else {
        module_closure(alg, &seeds)?
    };
    let mut check = Span::new(field, len);
    for b in sub.basis().iter().chain(u.basis()) {
        if !check.push(b.data()) {
            return Ok(None);
        }
    }
    Ok((check.dim() == module.dim()).then_some(u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{close_under_multiplication, group_algebra, PermGroupGens};

    fn f(q: u64) -> PrimeField {
        PrimeField::new(q).unwrap()
    }

    fn units(field: PrimeField, n: usize) -> Vec<FieldMatrix> {
        (0..n * n)
            .map(|i| FieldMatrix::from_fn(field, n, n, |r, c| (r * n + c == i) as u32))
            .collect()
    }

    #[test]
    fn closure_examples() {
        let f2 = f(2);
        let full = close_under_multiplication(&units(f2, 2), f2).unwrap();
        let e11 = units(f2, 2).remove(0);
        assert_eq!(module_closure(&full, &[e11]).unwrap().dim(), 2);
        let scalars = close_under_multiplication(&[FieldMatrix::identity(f2, 2)], f2).unwrap();
        let x = FieldMatrix::from_rows(f2, &[vec![1, 1], vec![0, 1]]).unwrap();
        assert_eq!(module_closure(&scalars, &[x]).unwrap().dim(), 1);
        let zero = FieldMatrix::zeros(f2, 2, 2);
        assert_eq!(module_closure(&scalars, &[zero]).unwrap().dim(), 0);
    }

    #[test]
    fn regular_module_is_cyclic() {
        let alg = group_algebra(&PermGroupGens::abelian_regular(&[2, 2]), f(2)).unwrap();
        let m = module_closure(&alg, &[FieldMatrix::identity(f(2), 4)]).unwrap();
        assert_eq!(m.dim(), 4);
        let g = is_cyclic_module(&alg, &m, 0).unwrap().unwrap();
        assert_eq!(module_closure(&alg, &[g]).unwrap().dim(), 4);
    }

    #[test]
    fn scalars_on_plane_not_cyclic() {
        let f2 = f(2);
        let scalars = close_under_multiplication(&[FieldMatrix::identity(f2, 2)], f2).unwrap();
        let m = ModuleBasis::new(
            f2,
            2,
            1,
            vec![
                FieldMatrix::from_rows(f2, &[vec![1], vec![0]]).unwrap(),
                FieldMatrix::from_rows(f2, &[vec![0], vec![1]]).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(is_cyclic_module(&scalars, &m, 0).unwrap(), None);
    }

    #[test]
    fn commutative_method_matches_exhaustive_search() {
        // Diagonal algebras and a non-semisimple one, acting on small column spaces.
        let f3 = f(3);
        let nil = FieldMatrix::from_rows(f3, &[vec![0, 1, 0], vec![0, 0, 0], vec![0, 0, 0]]).unwrap();
        let d = FieldMatrix::from_rows(f3, &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 0]]).unwrap();
        let algs = [
            close_under_multiplication(&[nil.clone()], f3).unwrap(),
            close_under_multiplication(&[d.clone()], f3).unwrap(),
            close_under_multiplication(&[nil, d], f3).unwrap(),
        ];
        for alg in &algs {
            for cols in 1..=2 {
                let whole: Vec<FieldMatrix> = (0..3 * cols)
                    .map(|i| FieldMatrix::from_fn(f3, 3, cols, |r, c| (r * cols + c == i) as u32))
                    .collect();
                let m = module_closure(alg, &whole).unwrap();
                let action = Action::new(f3, m.action_constants(alg).unwrap());
                let comm = Commutative::new(alg).unwrap();
                let exact = commutative_generator(&comm, &action, alg.dim());
                let searched = search_generator(&action, 0).unwrap();
                assert_eq!(exact.is_some(), searched.is_some());
                if let Some(g) = exact {
                    assert!(action.generates(&g));
                }
            }
        }
    }

    #[test]
    fn complement_in_semisimple_group_algebra() {
        let f3 = f(3);
        let alg = group_algebra(&PermGroupGens::abelian_regular(&[2, 2]), f3).unwrap();
        let m = module_closure(&alg, &[FieldMatrix::identity(f3, 4)]).unwrap();
        let all_ones = FieldMatrix::from_fn(f3, 4, 4, |_, _| 1);
        let sub = module_closure(&alg, &[all_ones]).unwrap();
        let u = complement(&alg, &m, &sub).unwrap().unwrap();
        assert_eq!(u.dim() + sub.dim(), m.dim());
    }
}
