use std::fmt;

use super::graph::{read_graph_block, OrderedGraph};
use super::relational::Structure;
use crate::error::{parse_err, Error, Result};
use crate::gf::text::{parse_u64, parse_usize, LineReader};
use crate::gf::{FieldMatrix, PrimeField};
use crate::wl::coloring::{tuple_count, TupleColoring};

/// Largest group or twist space materialized by enumeration.
pub const GROUP_BUDGET: u128 = 1 << 20;

/// The structure CFI[G; p; λ]. Element `(e, x)` of `A = E x F_p` has index `e * p + x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CfiStructure {
    graph: OrderedGraph,
    field: PrimeField,
    load: Vec<u32>,
}

/// A vector `π ∈ F_p^E` indexed by directed edge.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TwistVector {
    pub values: Vec<u32>,
}

/// Basis of the automorphism group Γ as a subspace of `F_p^E`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutomorphismBasis {
    pub field: PrimeField,
    pub basis: Vec<TwistVector>,
}

impl AutomorphismBasis {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// All `p^dim` group elements, ordered lexicographically by coefficient vector.
    pub fn enumerate(&self, edges: usize) -> Result<Vec<TwistVector>> {
        let p = self.field.modulus();
        let required = (p as u128).checked_pow(self.dim() as u32).unwrap_or(u128::MAX);
        if required > GROUP_BUDGET {
            return Err(Error::BudgetExceeded {
                what: format!("enumerating a group of order {p}^{}", self.dim()),
                required,
                budget: GROUP_BUDGET,
            });
        }
        let f = self.field;
        let mut out = Vec::with_capacity(required as usize);
        let mut coeffs = vec![0u32; self.dim()];
        loop {
            let mut values = vec![0u32; edges];
            for (c, b) in coeffs.iter().zip(&self.basis) {
                if *c != 0 {
                    for (v, &x) in values.iter_mut().zip(&b.values) {
                        *v = f.add(*v, f.mul(*c, x));
                    }
                }
            }
            out.push(TwistVector { values });
            if !increment(&mut coeffs, p) {
                return Ok(out);
            }
        }
    }
}

/// Base-`p` counter, last digit fastest; false once it wraps to zero.
fn increment(digits: &mut [u32], p: u32) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < p {
            return true;
        }
        *d = 0;
    }
    false
}

impl CfiStructure {
    pub fn build(graph: OrderedGraph, p: u64, load: &[u32]) -> Result<Self> {
        let field = PrimeField::new(p)?;
        if load.len() != graph.n() {
            return Err(Error::DimensionMismatch(format!(
                "load has {} entries, graph has {} vertices",
                load.len(),
                graph.n()
            )));
        }
        let load = load.iter().map(|&x| field.from_u64(x as u64)).collect();
        Ok(CfiStructure { graph, field, load })
    }

    pub fn graph(&self) -> &OrderedGraph {
        &self.graph
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn p(&self) -> u32 {
        self.field.modulus()
    }

    pub fn load(&self) -> &[u32] {
        &self.load
    }

    pub fn universe_size(&self) -> usize {
        self.graph.directed_count() * self.p() as usize
    }

    pub fn element(&self, e: usize, x: u32) -> usize {
        e * self.p() as usize + x as usize
    }

    /// `(e, x)` of element index `a`.
    pub fn split(&self, a: usize) -> (usize, u32) {
        let p = self.p() as usize;
        (a / p, (a % p) as u32)
    }

    /// Relations `pre` (⪯), `C`, `I` and `R`, in this order.
    pub fn to_structure(&self) -> Structure {
        let p = self.p();
        let m = self.graph.directed_count();
        let f = self.field;
        let el = |e: usize, x: u32| self.element(e, x) as u32;
        let n = self.universe_size();
        let mut pre = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if self.split(a).0 <= self.split(b).0 {
                    pre.push(vec![a as u32, b as u32]);
                }
            }
        }
        let mut cyc = Vec::new();
        let mut inv = Vec::new();
        for e in 0..m {
            for x in 0..p {
                cyc.push(vec![el(e, x), el(e, f.add(x, 1))]);
                inv.push(vec![el(e, x), el(self.graph.dual(e), f.neg(x))]);
            }
        }
        let mut r = Vec::new();
        for v in 0..self.graph.n() {
            let [e1, e2, e3] = self.graph.out_edges(v);
            for x1 in 0..p {
                for x2 in 0..p {
                    let x3 = f.sub(self.load[v], f.add(x1, x2));
                    r.push(vec![el(e1, x1), el(e2, x2), el(e3, x3)]);
                }
            }
        }
        Structure::new(n)
            .with_relation("pre", 2, pre)
            .and_then(|s| s.with_relation("C", 2, cyc))
            .and_then(|s| s.with_relation("I", 2, inv))
            .and_then(|s| s.with_relation("R", 3, r))
            .expect("well-formed CFI relations")
    }

    /// `Σ_v λ(v) mod p`.
    pub fn iso_invariant(&self) -> u32 {
        self.load.iter().fold(0, |acc, &x| self.field.add(acc, x))
    }

    pub fn check_twist(&self, pi: &TwistVector) -> Result<()> {
        let m = self.graph.directed_count();
        if pi.values.len() != m {
            return Err(Error::DimensionMismatch(format!(
                "twist has {} entries, graph has {m} directed edges",
                pi.values.len()
            )));
        }
        if let Some(&bad) = pi.values.iter().find(|&&x| x >= self.p()) {
            return Err(Error::DimensionMismatch(format!("twist entry {bad} is not a residue")));
        }
        for e in 0..m {
            if self.field.add(pi.values[e], pi.values[self.graph.dual(e)]) != 0 {
                return Err(Error::InvViolated { edge: e });
            }
        }
        Ok(())
    }

    /// `π(v) = Σ_{e ∈ E(v)} π(e)` for every vertex.
    pub fn vertex_sums(&self, pi: &TwistVector) -> Vec<u32> {
        (0..self.graph.n())
            .map(|v| {
                self.graph
                    .out_edges(v)
                    .iter()
                    .fold(0, |acc, &e| self.field.add(acc, pi.values[e]))
            })
            .collect()
    }

    /// CFI[G; p; λ + π].
    pub fn apply_twist(&self, pi: &TwistVector) -> Result<CfiStructure> {
        self.check_twist(pi)?;
        let sums = self.vertex_sums(pi);
        let load = self
            .load
            .iter()
            .zip(&sums)
            .map(|(&l, &s)| self.field.add(l, s))
            .collect();
        Ok(CfiStructure {
            graph: self.graph.clone(),
            field: self.field,
            load,
        })
    }

    /// The permutation `(e, x) -> (e, x + π(e))` of `A`.
    pub fn twist_permutation(&self, pi: &TwistVector) -> Vec<usize> {
        (0..self.universe_size())
            .map(|a| {
                let (e, x) = self.split(a);
                self.element(e, self.field.add(x, pi.values[e]))
            })
            .collect()
    }

    /// Coefficient matrix of the (Inv) and (CFI) equations, variables indexed by directed edge.
    pub fn constraint_matrix(&self) -> FieldMatrix {
        let m = self.graph.directed_count();
        let mut rows = Vec::new();
        for (e, &(u, v)) in self.graph.directed_edges().iter().enumerate() {
            if u < v {
                let mut row = vec![0u32; m];
                row[e] = 1;
                row[self.graph.dual(e)] = 1;
                rows.push(row);
            }
        }
        for v in 0..self.graph.n() {
            let mut row = vec![0u32; m];
            for e in self.graph.out_edges(v) {
                row[e] = 1;
            }
            rows.push(row);
        }
        let r = rows.len();
        FieldMatrix::new(self.field, r, m, rows.concat()).expect("0-1 entries")
    }

    pub fn automorphism_basis(&self) -> AutomorphismBasis {
        let basis = self
            .constraint_matrix()
            .kernel_basis()
            .into_iter()
            .map(|v| TwistVector {
                values: v.into_entries(),
            })
            .collect();
        AutomorphismBasis {
            field: self.field,
            basis,
        }
    }

    /// Every element of Γ as a permutation of `A`.
    pub fn group_permutations(&self) -> Result<Vec<Vec<usize>>> {
        let group = self
            .automorphism_basis()
            .enumerate(self.graph.directed_count())?;
        Ok(group.iter().map(|g| self.twist_permutation(g)).collect())
    }

    /// Γ-orbits on `A^k`; classes numbered by their lexicographically least tuple.
    pub fn orbit_partition(&self, k: usize) -> Result<TupleColoring> {
        let perms = self.group_permutations()?;
        let n = self.universe_size();
        let count = tuple_count(n, k, "orbit partition")?;
        let mut labels = vec![u32::MAX; count];
        let mut next = 0u32;
        let mut t = vec![0usize; k];
        for idx in 0..count {
            if labels[idx] != u32::MAX {
                continue;
            }
            let mut rest = idx;
            for slot in t.iter_mut().rev() {
                *slot = rest % n;
                rest /= n;
            }
            for g in &perms {
                let image = t.iter().fold(0, |acc, &x| acc * n + g[x]);
                labels[image] = next;
            }
            next += 1;
        }
        Ok(TupleColoring::from_labels(n, k, &labels))
    }

    /// Some Inv-respecting twist `π` with `apply_twist(self, π) = other`, searched over all
    /// `p^{m_und}` twists in lexicographic order of the values on edges `(u, v)` with `u < v`.
    pub fn brute_force_isomorphic(&self, other: &CfiStructure) -> Result<Option<TwistVector>> {
        if self.graph != other.graph || self.field != other.field {
            return Err(Error::SignatureMismatch(
                "CFI structures over different graphs or primes".into(),
            ));
        }
        let p = self.p();
        let forward: Vec<usize> = self
            .graph
            .directed_edges()
            .iter()
            .enumerate()
            .filter(|(_, &(u, v))| u < v)
            .map(|(e, _)| e)
            .collect();
        let required = (p as u128)
            .checked_pow(forward.len() as u32)
            .unwrap_or(u128::MAX);
        if required > GROUP_BUDGET {
            return Err(Error::BudgetExceeded {
                what: format!("brute-force isomorphism over {p}^{} twists", forward.len()),
                required,
                budget: GROUP_BUDGET,
            });
        }
        let f = self.field;
        let target: Vec<u32> = other
            .load
            .iter()
            .zip(&self.load)
            .map(|(&s, &l)| f.sub(s, l))
            .collect();
        let mut digits = vec![0u32; forward.len()];
        let mut pi = TwistVector {
            values: vec![0; self.graph.directed_count()],
        };
        loop {
            for (&e, &d) in forward.iter().zip(&digits) {
                pi.values[e] = d;
                pi.values[self.graph.dual(e)] = f.neg(d);
            }
            if self.vertex_sums(&pi) == target {
                return Ok(Some(pi));
            }
            if !increment(&mut digits, p) {
                return Ok(None);
            }
        }
    }
}

impl fmt::Display for CfiStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "cfi p={}", self.p())?;
        write!(f, "{}", self.graph)?;
        for (v, &x) in self.load.iter().enumerate() {
            if x != 0 {
                writeln!(f, "load {v} {x}")?;
            }
        }
        Ok(())
    }
}

impl std::str::FromStr for CfiStructure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut reader = LineReader::new(s);
        let (ln, header) = reader.expect_line("`cfi p=<p>`")?;
        let p = header
            .trim()
            .strip_prefix("cfi p=")
            .ok_or_else(|| parse_err(ln, "expected `cfi p=<p>`"))?;
        let p = parse_u64(ln, Some(p), "prime")?;
        let field = PrimeField::new(p).map_err(|e| parse_err(ln, e.to_string()))?;
        let g = read_graph_block(&mut reader, "ordered-graph")?;
        let gl = reader.line_number();
        let graph = OrderedGraph::from_simple(g).map_err(|e| parse_err(gl, e.to_string()))?;
        let mut load = vec![0u32; graph.n()];
        while let Some((ln, line)) = reader.next_line() {
            let mut toks = line.split_whitespace();
            if toks.next() != Some("load") {
                return Err(parse_err(ln, "expected `load <v> <value>`"));
            }
            let v = parse_usize(ln, toks.next(), "vertex")?;
            let x = parse_u64(ln, toks.next(), "value")?;
            if toks.next().is_some() {
                return Err(parse_err(ln, "trailing tokens"));
            }
            if v >= graph.n() {
                return Err(parse_err(ln, format!("vertex {v} out of range")));
            }
            load[v] = field.from_u64(x);
        }
        Ok(CfiStructure { graph, field, load })
    }
}

impl TwistVector {
    pub fn zero(edges: usize) -> Self {
        TwistVector {
            values: vec![0; edges],
        }
    }

    /// Writes `twist <edges> mod <p>` followed by `<u> <v> <value>` for nonzero entries.
    pub fn to_text(&self, graph: &OrderedGraph, p: u32) -> String {
        let mut out = format!("twist {} mod {p}\n", self.values.len());
        for (e, &x) in self.values.iter().enumerate() {
            if x != 0 {
                let (u, v) = graph.directed_edges()[e];
                out.push_str(&format!("{u} {v} {x}\n"));
            }
        }
        out
    }

    pub fn parse(text: &str, graph: &OrderedGraph, field: PrimeField) -> Result<Self> {
        let mut reader = LineReader::new(text);
        let (ln, header) = reader.expect_line("twist header")?;
        let mut toks = header.split_whitespace();
        if toks.next() != Some("twist") {
            return Err(parse_err(ln, "expected `twist <edges> mod <p>`"));
        }
        let m = parse_usize(ln, toks.next(), "edge count")?;
        if toks.next() != Some("mod") {
            return Err(parse_err(ln, "expected `mod`"));
        }
        let p = parse_u64(ln, toks.next(), "modulus")?;
        if m != graph.directed_count() || p != field.modulus() as u64 {
            return Err(parse_err(ln, "twist does not match the structure"));
        }
        let mut values = vec![0u32; m];
        while let Some((ln, line)) = reader.next_line() {
            let mut toks = line.split_whitespace();
            let u = parse_usize(ln, toks.next(), "source")?;
            let v = parse_usize(ln, toks.next(), "target")?;
            let x = parse_u64(ln, toks.next(), "value")?;
            let e = graph
                .edge_index(u, v)
                .ok_or_else(|| parse_err(ln, format!("({u}, {v}) is not an edge")))?;
            values[e] = field.from_u64(x);
        }
        Ok(TwistVector { values })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k4(p: u64, load: &[u32]) -> CfiStructure {
        CfiStructure::build(OrderedGraph::catalog("K4").unwrap(), p, load).unwrap()
    }

    #[test]
    fn relation_cardinalities() {
        let s = k4(2, &[0; 4]).to_structure();
        assert_eq!(s.n(), 24);
        assert_eq!(s.relation("R").unwrap().len(), 16);
        assert_eq!(s.relation("C").unwrap().len(), 24);
        let s3 = k4(3, &[1, 2, 0, 1]).to_structure();
        assert_eq!(s3.n(), 36);
        assert_eq!(s3.relation("R").unwrap().len(), 36);
        let i = s3.relation("I").unwrap();
        assert!(i.tuples().iter().all(|t| i.contains(&[t[1], t[0]])));
    }

    #[test]
    fn invariant_examples() {
        assert_eq!(k4(2, &[0; 4]).iso_invariant(), 0);
        assert_eq!(k4(2, &[1, 0, 0, 0]).iso_invariant(), 1);
        assert_eq!(k4(2, &[1, 1, 0, 0]).iso_invariant(), 0);
    }

    #[test]
    fn twist_on_one_dual_pair() {
        let s = k4(3, &[0; 4]);
        let g = s.graph();
        let e = g.edge_index(0, 2).unwrap();
        let mut pi = TwistVector::zero(12);
        pi.values[e] = 1;
        pi.values[g.dual(e)] = 2;
        let t = s.apply_twist(&pi).unwrap();
        assert_eq!(t.load(), &[1, 0, 2, 0]);
        pi.values[g.dual(e)] = 1;
        assert!(matches!(s.apply_twist(&pi), Err(Error::InvViolated { .. })));
    }

    #[test]
    fn twist_permutation_is_an_isomorphism() {
        let s = k4(3, &[2, 0, 1, 0]);
        let basis = s.automorphism_basis();
        let mut pi = TwistVector::zero(12);
        let e = s.graph().edge_index(1, 3).unwrap();
        pi.values[e] = 2;
        pi.values[s.graph().dual(e)] = 1;
        let t = s.apply_twist(&pi).unwrap();
        assert!(s
            .to_structure()
            .is_isomorphism(&t.to_structure(), &s.twist_permutation(&pi)));
        for b in &basis.basis {
            assert_eq!(s.apply_twist(b).unwrap(), s);
        }
    }

    #[test]
    fn automorphism_dimension_k4() {
        assert_eq!(k4(2, &[0; 4]).automorphism_basis().dim(), 3);
    }

    #[test]
    fn orbits_of_single_elements() {
        let c = k4(2, &[0; 4]).orbit_partition(1).unwrap();
        assert_eq!(c.num_classes(), 12);
        assert!(c.class_sizes().iter().all(|&s| s == 2));
    }

    #[test]
    fn brute_force_examples() {
        let a = k4(2, &[0; 4]);
        assert_eq!(a.brute_force_isomorphic(&a).unwrap(), Some(TwistVector::zero(12)));
        assert_eq!(a.brute_force_isomorphic(&k4(2, &[1, 0, 0, 0])).unwrap(), None);
        let b = k4(2, &[1, 0, 0, 0]);
        let c = k4(2, &[0, 0, 1, 0]);
        let pi = b.brute_force_isomorphic(&c).unwrap().unwrap();
        assert_eq!(b.apply_twist(&pi).unwrap(), c);
    }

    #[test]
    fn file_round_trip() {
        let s = k4(3, &[0, 2, 0, 1]);
        let text = s.to_string();
        let back: CfiStructure = text.parse().unwrap();
        assert_eq!(back, s);
        assert_eq!(back.to_string(), text);
    }

    #[test]
    fn twist_file_round_trip() {
        let s = k4(3, &[0; 4]);
        let pi = &s.automorphism_basis().basis[0];
        let text = pi.to_text(s.graph(), 3);
        assert_eq!(&TwistVector::parse(&text, s.graph(), s.field()).unwrap(), pi);
    }
}
