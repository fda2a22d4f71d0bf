//! Linear systems invariant under a permutation group: symmetric solutions by averaging
//! and by orbit quotients, orbit orders, and `(j, s)`-kernel generators.
//!
//! System file:
//!
//! ```text
//! matrix <rows> <cols> mod <q>
//! <rows>
//! vector <rows> mod <q>
//! <entries>
//! perm <images of the rows> <images of the columns>
//! ...
//! ```
//!
//! Row images lie in `0..rows`, column images in `0..cols`.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use crate::algebra::{compose, PermGroupGens};
use crate::error::{parse_err, Error, Result};
use crate::gf::text::{parse_u64, parse_usize, read_matrix, LineReader};
use crate::gf::{FieldMatrix, FieldVector, PrimeField};

/// `M x = b` with a group acting on rows `I` and columns `J`; the group lives on
/// `0..|I| + |J|` with the columns shifted by `|I|`.
#[derive(Clone, Debug)]
pub struct InvariantSystem {
    m: FieldMatrix,
    b: FieldVector,
    group: PermGroupGens,
    elements: Vec<Vec<usize>>,
}

impl InvariantSystem {
    /// Generators as (row permutation, column permutation) pairs.
    pub fn new(m: FieldMatrix, b: FieldVector, generators: Vec<(Vec<usize>, Vec<usize>)>) -> Result<Self> {
        let rows = m.rows();
        let combined = generators
            .into_iter()
            .map(|(r, c)| {
                if r.len() != rows || c.len() != m.cols() {
                    return Err(Error::ShapeMismatch(format!(
                        "permutation of {}+{} points for a {}x{} system",
                        r.len(),
                        c.len(),
                        rows,
                        m.cols()
                    )));
                }
                Ok(r.into_iter().chain(c.into_iter().map(|x| x + rows)).collect())
            })
            .collect::<Result<Vec<Vec<usize>>>>()?;
        let group = PermGroupGens::new(rows + m.cols(), combined, false)?;
        InvariantSystem::from_group(m, b, group)
    }

    pub fn from_group(m: FieldMatrix, b: FieldVector, group: PermGroupGens) -> Result<Self> {
        let (rows, cols) = m.shape();
        if b.len() != rows || b.field() != m.field() {
            return Err(Error::DimensionMismatch(format!(
                "right-hand side of length {} for {rows} rows",
                b.len()
            )));
        }
        if group.degree() != rows + cols {
            return Err(Error::ShapeMismatch(format!(
                "group of degree {} for a {rows}x{cols} system",
                group.degree()
            )));
        }
        for (k, g) in group.generators().iter().enumerate() {
            if g[..rows].iter().any(|&x| x >= rows) {
                return Err(Error::NotInvariant(format!("generator {k} moves a row to a column")));
            }
            for i in 0..rows {
                if b.get(g[i]) != b.get(i) {
                    return Err(Error::NotInvariant(format!("generator {k} changes b at row {i}")));
                }
                for j in 0..cols {
                    if m.get(g[i], g[rows + j] - rows) != m.get(i, j) {
                        return Err(Error::NotInvariant(format!("generator {k} changes M at ({i}, {j})")));
                    }
                }
            }
        }
        let elements = group.elements()?;
        let q = m.field().modulus();
        if (elements.len() as u64).is_multiple_of(q as u64) {
            return Err(Error::CharacteristicDividesOrder {
                q,
                order: elements.len() as u128,
            });
        }
        Ok(InvariantSystem { m, b, group, elements })
    }

    pub fn field(&self) -> PrimeField {
        self.m.field()
    }

    pub fn matrix(&self) -> &FieldMatrix {
        &self.m
    }

    pub fn rhs(&self) -> &FieldVector {
        &self.b
    }

    pub fn group(&self) -> &PermGroupGens {
        &self.group
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Column permutation of a group element.
    fn columns_of(&self, g: &[usize]) -> Vec<usize> {
        let rows = self.m.rows();
        g[rows..].iter().map(|&x| x - rows).collect()
    }

    /// `(Π c)(π(j)) = c(j)`.
    pub fn act(&self, g: &[usize], c: &FieldVector) -> FieldVector {
        let cols = self.columns_of(g);
        let mut out = vec![0; c.len()];
        for (j, &pj) in cols.iter().enumerate() {
            out[pj] = c.get(j);
        }
        FieldVector::new(self.field(), out).expect("reduced entries")
    }

    /// Whether every generator fixes `c`.
    pub fn is_symmetric(&self, c: &FieldVector) -> bool {
        self.group.generators().iter().all(|g| &self.act(g, c) == c)
    }

    pub fn is_solution(&self, c: &FieldVector) -> bool {
        c.len() == self.m.cols() && self.m.mul_vec(c).is_ok_and(|v| v == self.b)
    }

    fn column_orbits(&self) -> Vec<Vec<usize>> {
        let rows = self.m.rows();
        let points: Vec<usize> = (rows..rows + self.m.cols()).collect();
        orbits(&self.group, &points)
            .into_iter()
            .map(|o| o.into_iter().map(|x| x - rows).collect())
            .collect()
    }

    fn row_orbits(&self) -> Vec<Vec<usize>> {
        orbits(&self.group, &(0..self.m.rows()).collect::<Vec<_>>())
    }
}

/// Orbits of the group on `points` (a union of orbits), each sorted, ordered by minimum.
fn orbits(group: &PermGroupGens, points: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; group.degree()];
    let mut out = Vec::new();
    let mut sorted = points.to_vec();
    sorted.sort_unstable();
    for &p in &sorted {
        if seen[p] {
            continue;
        }
        seen[p] = true;
        let mut orbit = vec![p];
        let mut i = 0;
        while i < orbit.len() {
            for g in group.generators() {
                let y = g[orbit[i]];
                if !seen[y] {
                    seen[y] = true;
                    orbit.push(y);
                }
            }
            i += 1;
        }
        orbit.sort_unstable();
        out.push(orbit);
    }
    out
}

fn check_abelian(group: &PermGroupGens) -> Result<()> {
    let gens = group.generators();
    for (i, g) in gens.iter().enumerate() {
        for h in &gens[i + 1..] {
            if compose(g, h) != compose(h, g) {
                return Err(Error::NotAbelian);
            }
        }
    }
    Ok(())
}

/// `d = |Γ|^{-1} Σ_Π Π c`, a solution fixed by the group.
pub fn symmetrize_solution(sys: &InvariantSystem, c: &FieldVector) -> Result<FieldVector> {
    if !sys.is_solution(c) {
        return Err(Error::NotASolution);
    }
    let field = sys.field();
    let mut sum = vec![0u32; c.len()];
    for g in &sys.elements {
        for (x, y) in sum.iter_mut().zip(sys.act(g, c).entries()) {
            *x = field.add(*x, *y);
        }
    }
    let scale = field.inv(field.from_u64(sys.order() as u64)).expect("order coprime to q");
    let d = FieldVector::new(field, sum.into_iter().map(|x| field.mul(x, scale)).collect())?;
    debug_assert!(sys.is_symmetric(&d) && sys.is_solution(&d));
    Ok(d)
}

/// Solves the orbit-quotient system and lifts; present iff `M x = b` is solvable.
pub fn solve_invariant_system(sys: &InvariantSystem) -> Option<FieldVector> {
    let field = sys.field();
    let col_orbits = sys.column_orbits();
    let mut orbit_of = vec![0; sys.m.cols()];
    for (r, o) in col_orbits.iter().enumerate() {
        for &j in o {
            orbit_of[j] = r;
        }
    }
    let reps: Vec<usize> = sys.row_orbits().iter().map(|o| o[0]).collect();
    let mut q = FieldMatrix::zeros(field, reps.len(), col_orbits.len());
    for (a, &i) in reps.iter().enumerate() {
        for j in 0..sys.m.cols() {
            let v = field.add(q.get(a, orbit_of[j]), sys.m.get(i, j));
            q.set(a, orbit_of[j], v);
        }
    }
    let rhs = FieldVector::new(field, reps.iter().map(|&i| sys.b.get(i)).collect()).expect("reduced");
    let y = q.solve(&rhs).expect("consistent shapes")?;
    let x = FieldVector::new(field, orbit_of.iter().map(|&r| y.get(r)).collect()).expect("reduced");
    debug_assert!(sys.is_solution(&x));
    Some(x)
}

/// Orbits of an abelian group on a point set and the order `<_j` on the orbit of `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitOrder {
    /// Sorted orbits, ordered by their minimal element.
    pub orbits: Vec<Vec<usize>>,
    pub parameter: usize,
    /// The orbit of the parameter listed in `<_j` order.
    pub order: Vec<usize>,
}

impl OrbitOrder {
    pub fn orbit_of(&self, x: usize) -> Option<usize> {
        self.orbits.iter().position(|o| o.binary_search(&x).is_ok())
    }

    /// Position of `x` under `<_j`.
    pub fn position(&self, x: usize) -> Option<usize> {
        self.order.iter().position(|&y| y == x)
    }
}

/// Elements of the orbit of `j` sorted by the lexicographically least group element
/// (as an image list) mapping `j` to them.
fn order_within(elements: &[Vec<usize>], j: usize) -> Vec<usize> {
    let mut best: std::collections::BTreeMap<usize, &Vec<usize>> = Default::default();
    for g in elements {
        let e = best.entry(g[j]).or_insert(g);
        if g < *e {
            *e = g;
        }
    }
    let mut order: Vec<(&Vec<usize>, usize)> = best.into_iter().map(|(x, g)| (g, x)).collect();
    order.sort();
    order.into_iter().map(|(_, x)| x).collect()
}

pub fn orbit_order(group: &PermGroupGens, points: &[usize], j: usize) -> Result<OrbitOrder> {
    check_abelian(group)?;
    if !points.contains(&j) || points.iter().any(|&p| p >= group.degree()) {
        return Err(Error::ShapeMismatch(format!("parameter {j} outside the point set")));
    }
    let elements = group.elements()?;
    Ok(OrbitOrder {
        orbits: orbits(group, points),
        parameter: j,
        order: order_within(&elements, j),
    })
}

/// A `(j, s)`-generator of `ker M`: zero on the orbits before `orbit`, zero at the
/// positions before `position` under `<_j`, and one at `position`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelGenerator {
    pub orbit: usize,
    pub parameter: usize,
    pub position: usize,
    pub vector: FieldVector,
}

/// Smallest-first greedy generating set of the subgroup `elements`.
fn generating_subset(elements: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut gens: Vec<Vec<usize>> = Vec::new();
    let mut closure: HashSet<Vec<usize>> = HashSet::new();
    if let Some(id) = elements.first() {
        closure.insert((0..id.len()).collect());
    }
    for g in elements {
        if closure.contains(g) {
            continue;
        }
        gens.push(g.clone());
        let mut frontier: Vec<Vec<usize>> = closure.iter().cloned().collect();
        while let Some(x) = frontier.pop() {
            for h in &gens {
                let y = compose(h, &x);
                if closure.insert(y.clone()) {
                    frontier.push(y);
                }
            }
        }
    }
    gens
}

/// One canonical parameter (the least element) per column orbit; every `(j, s)` for which
/// `KER(j, s)` is solvable contributes its symmetric solution under the stabilizer of `j`.
pub fn kernel_generators(sys: &InvariantSystem) -> Result<Vec<KernelGenerator>> {
    check_abelian(&sys.group)?;
    let field = sys.field();
    let (rows, cols) = sys.m.shape();
    let col_orbits = sys.column_orbits();
    let mut out = Vec::new();
    for (r, orbit) in col_orbits.iter().enumerate() {
        let j = orbit[0];
        let shifted: Vec<Vec<usize>> = sys.elements.iter().map(|g| sys.columns_of(g)).collect();
        let order = order_within(&shifted, j);
        let stabilizer: Vec<Vec<usize>> = sys.elements.iter().filter(|g| g[rows + j] == rows + j).cloned().collect();
        let stab_gens = generating_subset(&stabilizer);
        let earlier: Vec<usize> = col_orbits[..r].iter().flatten().copied().collect();
        let mut earlier_index = vec![usize::MAX; cols];
        for (t, &y) in earlier.iter().enumerate() {
            earlier_index[y] = t;
        }
        for s in 0..order.len() {
            // Rows: M, then x_y = 0 on earlier orbits, then x = 0 before s, then x = 1 at s.
            let extra = earlier.len() + s + 1;
            let aug_rows = rows + extra;
            let mut data = vec![0u32; aug_rows * cols];
            for i in 0..rows {
                for c in 0..cols {
                    data[i * cols + c] = sys.m.get(i, c);
                }
            }
            for (t, &y) in earlier.iter().enumerate() {
                data[(rows + t) * cols + y] = 1;
            }
            for (t, &y) in order[..=s].iter().enumerate() {
                data[(rows + earlier.len() + t) * cols + y] = 1;
            }
            let mut rhs = vec![0u32; aug_rows];
            rhs[..rows].copy_from_slice(sys.b.entries());
            rhs.iter_mut().take(rows).for_each(|x| *x = 0);
            rhs[aug_rows - 1] = 1;
            let gens = stab_gens
                .iter()
                .map(|g| {
                    let mut row_perm: Vec<usize> = g[..rows].to_vec();
                    row_perm.extend(earlier.iter().map(|&y| rows + earlier_index[g[rows + y] - rows]));
                    row_perm.extend(rows + earlier.len()..aug_rows);
                    (row_perm, sys.columns_of(g))
                })
                .collect();
            let aug = InvariantSystem::new(
                FieldMatrix::new(field, aug_rows, cols, data)?,
                FieldVector::new(field, rhs)?,
                gens,
            )?;
            if let Some(v) = solve_invariant_system(&aug) {
                out.push(KernelGenerator {
                    orbit: r,
                    parameter: j,
                    position: s,
                    vector: v,
                });
            }
        }
    }
    Ok(out)
}

/// Dimension of the span of the generator vectors.
pub fn span_dimension(field: PrimeField, cols: usize, gens: &[KernelGenerator]) -> usize {
    let mut ech = crate::gf::Echelon::new(field, cols);
    for g in gens {
        ech.insert(g.vector.entries().to_vec());
    }
    ech.rank()
}

impl fmt::Display for InvariantSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.m)?;
        writeln!(f, "vector {} mod {}", self.b.len(), self.field().modulus())?;
        let e: Vec<String> = self.b.entries().iter().map(u32::to_string).collect();
        writeln!(f, "{}", e.join(" "))?;
        let rows = self.m.rows();
        for g in self.group.generators() {
            let imgs: Vec<String> = g
                .iter()
                .enumerate()
                .map(|(i, &x)| if i < rows { x } else { x - rows }.to_string())
                .collect();
            writeln!(f, "perm {}", imgs.join(" "))?;
        }
        Ok(())
    }
}

impl FromStr for InvariantSystem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut reader = LineReader::new(s);
        let m = read_matrix(&mut reader)?;
        let (line, header) = reader.expect_line("vector header")?;
        let tok: Vec<&str> = header.split_whitespace().collect();
        if tok.len() != 4 || tok[0] != "vector" || tok[2] != "mod" {
            return Err(parse_err(line, "expected `vector <len> mod <q>`"));
        }
        let len = parse_usize(line, Some(tok[1]), "vector length")?;
        let q = parse_u64(line, Some(tok[3]), "modulus")?;
        if q != m.field().modulus() as u64 {
            return Err(parse_err(line, "vector modulus differs from the matrix modulus"));
        }
        let (line, text) = if len == 0 {
            reader.next_raw().unwrap_or((line + 1, ""))
        } else {
            reader.expect_line("vector entries")?
        };
        let entries: Vec<i64> = text
            .split_whitespace()
            .map(|t| t.parse::<i64>().map_err(|_| parse_err(line, format!("bad entry `{t}`"))))
            .collect::<Result<_>>()?;
        if entries.len() != len {
            return Err(parse_err(line, format!("expected {len} entries, found {}", entries.len())));
        }
        let b = FieldVector::from_i64(m.field(), &entries);
        let rows = m.rows();
        let mut gens = Vec::new();
        while let Some((line, text)) = reader.next_line() {
            let mut tok = text.split_whitespace();
            if tok.next() != Some("perm") {
                return Err(parse_err(line, "expected `perm <images>`"));
            }
            let imgs: Vec<usize> = tok.map(|t| parse_usize(line, Some(t), "image")).collect::<Result<_>>()?;
            if imgs.len() != rows + m.cols() {
                return Err(parse_err(line, format!("expected {} images", rows + m.cols())));
            }
            gens.push((imgs[..rows].to_vec(), imgs[rows..].to_vec()));
        }
        InvariantSystem::new(m, b, gens)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(q: u64) -> PrimeField {
        PrimeField::new(q).unwrap()
    }

    fn swap_system(q: u64, b: i64) -> InvariantSystem {
        // x_0 + x_1 = b, swapped columns, fixed row.
        let m = FieldMatrix::from_rows(f(q), &[vec![1, 1]]).unwrap();
        let b = FieldVector::from_i64(f(q), &[b]);
        InvariantSystem::new(m, b, vec![(vec![0], vec![1, 0])]).unwrap()
    }

    #[test]
    fn rejects_bad_systems() {
        let m = FieldMatrix::from_rows(f(2), &[vec![1, 1]]).unwrap();
        let b = FieldVector::from_i64(f(2), &[1]);
        assert!(matches!(
            InvariantSystem::new(m, b, vec![(vec![0], vec![1, 0])]),
            Err(Error::CharacteristicDividesOrder { q: 2, order: 2 })
        ));
        let m = FieldMatrix::from_rows(f(3), &[vec![1, 2]]).unwrap();
        let b = FieldVector::from_i64(f(3), &[1]);
        assert!(matches!(
            InvariantSystem::new(m, b, vec![(vec![0], vec![1, 0])]),
            Err(Error::NotInvariant(_))
        ));
    }

    #[test]
    fn symmetrize_swap() {
        let sys = swap_system(3, 1);
        let c = FieldVector::from_i64(f(3), &[1, 0]);
        let d = symmetrize_solution(&sys, &c).unwrap();
        assert_eq!(d.entries(), &[2, 2]);
        assert!(sys.is_symmetric(&d) && sys.is_solution(&d));
        assert_eq!(symmetrize_solution(&sys, &d).unwrap(), d);
        let bad = FieldVector::from_i64(f(3), &[1, 1]);
        assert!(matches!(symmetrize_solution(&sys, &bad), Err(Error::NotASolution)));
    }

    #[test]
    fn quotient_solve() {
        let sys = swap_system(3, 1);
        let x = solve_invariant_system(&sys).unwrap();
        assert!(sys.is_symmetric(&x) && sys.is_solution(&x));
        let m = FieldMatrix::from_rows(f(3), &[vec![1, 1], vec![1, 1]]).unwrap();
        let b = FieldVector::from_i64(f(3), &[1, 2]);
        let inconsistent = InvariantSystem::new(m, b, vec![]).unwrap();
        assert!(solve_invariant_system(&inconsistent).is_none());
    }

    #[test]
    fn orbit_order_swap() {
        let g = PermGroupGens::new(2, vec![vec![1, 0]], true).unwrap();
        let o = orbit_order(&g, &[0, 1], 0).unwrap();
        assert_eq!(o.order, vec![0, 1]);
        assert_eq!(o.orbits, vec![vec![0, 1]]);
        let trivial = PermGroupGens::new(3, vec![], true).unwrap();
        let o = orbit_order(&trivial, &[0, 1, 2], 1).unwrap();
        assert_eq!(o.orbits.len(), 3);
        assert_eq!(o.order, vec![1]);
    }

    #[test]
    fn kernel_generators_examples() {
        let zero = FieldMatrix::zeros(f(5), 2, 3);
        let sys = InvariantSystem::new(zero, FieldVector::zeros(f(5), 2), vec![]).unwrap();
        let gens = kernel_generators(&sys).unwrap();
        assert_eq!(gens.len(), 3);
        assert!(gens.iter().all(|g| g.position == 0 && g.vector.entries().iter().sum::<u32>() == 1));

        let id = FieldMatrix::identity(f(5), 3);
        let sys = InvariantSystem::new(id, FieldVector::zeros(f(5), 3), vec![]).unwrap();
        assert!(kernel_generators(&sys).unwrap().is_empty());

        // Z_3 rotating three columns; M sums them.
        let m = FieldMatrix::from_rows(f(5), &[vec![1, 1, 1]]).unwrap();
        let sys = InvariantSystem::new(m, FieldVector::zeros(f(5), 1), vec![(vec![0], vec![1, 2, 0])]).unwrap();
        let gens = kernel_generators(&sys).unwrap();
        assert_eq!(span_dimension(f(5), 3, &gens), 2);
    }

    #[test]
    fn text_round_trip() {
        let sys = swap_system(5, 3);
        let text = sys.to_string();
        assert!(text.ends_with("vector 1 mod 5\n3\nperm 0 1 0\n"));
        let back: InvariantSystem = text.parse().unwrap();
        assert_eq!(back.matrix(), sys.matrix());
        assert_eq!(back.rhs(), sys.rhs());
        assert_eq!(back.group().generators(), sys.group().generators());
    }
}
