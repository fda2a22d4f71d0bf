//! Invertible-map equivalence: partition refinement of `k`-tuples by simultaneous
//! similarity of class-indicator matrix families over prime fields.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::ops::Range;

use crate::error::{Error, Result};
use crate::gf::{Echelon, FieldMatrix, PrimeField};
use crate::simsim::Decider;
use crate::structures::{CfiStructure, Structure};
use crate::wl::{atomic_types, canonical_ranks_of_slices, canonical_ranks_u128, side_counts, tuple_count, TupleColoring};

/// Largest `|A|^m` for which indicator matrices are built.
pub const MATRIX_LIMIT: usize = 1 << 12;

/// Stable invertible-map partition of `A^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImPartition {
    pub k: usize,
    pub primes: Vec<u64>,
    pub classes: TupleColoring,
    pub rounds: usize,
    /// Class count after atomic types and after every round.
    pub class_counts: Vec<usize>,
    /// Similarity tests run (cheap invariants excluded).
    pub similarity_tests: usize,
}

impl ImPartition {
    /// Per-round class counts followed by the partition report.
    pub fn report(&self, verbose: bool) -> String {
        let mut out = String::new();
        let primes: Vec<String> = self.primes.iter().map(u64::to_string).collect();
        writeln!(out, "im k={} Q={{{}}} rounds={}", self.k, primes.join(","), self.rounds).unwrap();
        for (r, c) in self.class_counts.iter().enumerate() {
            writeln!(out, "round {r} classes {c}").unwrap();
        }
        out.push_str(&self.classes.report(verbose));
        out
    }
}

/// Ordered `2m`-tuples of distinct positions in `0..k`.
fn injections(k: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(k: usize, len: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for p in 0..k {
            if !cur.contains(&p) {
                cur.push(p);
                go(k, len, cur, out);
                cur.pop();
            }
        }
    }
    go(k, len, &mut cur, &mut out);
    out
}

/// Indicator family of one context: substitution size and the class of every cell of
/// `D^m x D^m`, row-major.
struct Family {
    size: usize,
    cells: Vec<u32>,
}

/// Families for one `γ` with substitutions and context values drawn from `dom`, contexts
/// in lexicographic order over `dom`.
fn domain_families(colors: &[u32], n: usize, k: usize, m: usize, gamma: &[usize], dom: Range<usize>, out: &mut Vec<Family>) {
    let d = dom.len();
    let weight: Vec<usize> = (0..k).map(|p| n.pow((k - 1 - p) as u32)).collect();
    let rest: Vec<usize> = (0..k).filter(|p| !gamma.contains(p)).collect();
    let size = d.pow(m as u32);
    // Offset contributed by an m-tuple index placed at the positions gamma[off..off + m].
    let place = |idx: usize, off: usize| -> usize {
        let mut idx = idx;
        let mut total = 0;
        for i in (0..m).rev() {
            total += (dom.start + idx % d) * weight[gamma[off + i]];
            idx /= d;
        }
        total
    };
    let row_off: Vec<usize> = (0..size).map(|b| place(b, 0)).collect();
    let col_off: Vec<usize> = (0..size).map(|c| place(c, m)).collect();
    for ctx in 0..d.pow(rest.len() as u32) {
        let mut rem = ctx;
        let mut base = 0;
        for &p in rest.iter().rev() {
            base += (dom.start + rem % d) * weight[p];
            rem /= d;
        }
        let mut cells = Vec::with_capacity(size * size);
        for &ro in &row_off {
            for &co in &col_off {
                cells.push(colors[base + ro + co]);
            }
        }
        out.push(Family { size, cells });
    }
}

/// Members of a family: class ids present, with their cells.
fn members(cells: &[u32]) -> Vec<(u32, Vec<usize>)> {
    let mut by_class: HashMap<u32, Vec<usize>> = HashMap::new();
    for (i, &c) in cells.iter().enumerate() {
        by_class.entry(c).or_default().push(i);
    }
    let mut out: Vec<(u32, Vec<usize>)> = by_class.into_iter().collect();
    out.sort_unstable_by_key(|(c, _)| *c);
    out
}

/// Size, class ids, then rank and trace of every member over `F_p`.
fn invariant_key(field: PrimeField, size: usize, members: &[(u32, Vec<usize>)]) -> Vec<u64> {
    let mut key = Vec::with_capacity(1 + members.len() * 3);
    key.push(size as u64);
    let mut rows: Vec<Vec<(usize, u32)>> = vec![Vec::new(); size];
    for (class, cells) in members {
        rows.iter_mut().for_each(Vec::clear);
        let mut trace = 0u32;
        for &cell in cells {
            let (r, c) = (cell / size, cell % size);
            rows[r].push((c, 1));
            if r == c {
                trace = field.add(trace, 1);
            }
        }
        let mut ech = Echelon::new(field, size);
        for row in rows.iter().filter(|r| !r.is_empty()) {
            ech.insert_sparse(row);
        }
        key.extend([*class as u64, ech.rank() as u64, trace as u64]);
    }
    key
}

fn matrices(field: PrimeField, size: usize, members: &[(u32, Vec<usize>)]) -> Vec<FieldMatrix> {
    members
        .iter()
        .map(|(_, cells)| {
            let mut m = FieldMatrix::zeros(field, size, size);
            for &cell in cells {
                m.set(cell / size, cell % size, 1);
            }
            m
        })
        .collect()
}

/// Similarity-class label of every context for one `γ` and prime: the rank of the invariant
/// key, then first fit against the representatives of that key in context order.
fn group_contexts(fams: &[Family], field: PrimeField, seed: u64, tests: &mut usize) -> Result<Vec<u64>> {
    let member_lists: Vec<Vec<(u32, Vec<usize>)>> = fams.iter().map(|f| members(&f.cells)).collect();
    let inv: Vec<Vec<u64>> = member_lists
        .iter()
        .zip(fams)
        .map(|(m, f)| invariant_key(field, f.size, m))
        .collect();
    // Keys have different lengths; prefix each with its length and pad to a common width.
    let max_len = inv.iter().map(Vec::len).max().unwrap_or(0);
    let width = max_len + 1;
    let mut keys = Vec::with_capacity(inv.len() * width);
    for k in &inv {
        keys.push(k.len() as u64);
        keys.extend_from_slice(k);
        keys.extend(std::iter::repeat_n(u64::MAX, max_len - k.len()));
    }
    let (buckets, _) = canonical_ranks_of_slices(&keys, width);

    let mut labels = Vec::with_capacity(fams.len());
    let mut reps: HashMap<u32, Vec<usize>> = HashMap::new();
    let mut rep_mats: HashMap<usize, Vec<FieldMatrix>> = HashMap::new();
    for ctx in 0..fams.len() {
        let bucket = buckets[ctx];
        let size = fams[ctx].size;
        let list = reps.entry(bucket).or_default();
        let mut found = None;
        let mut mats = None;
        for (i, &r) in list.iter().enumerate() {
            if fams[r].cells == fams[ctx].cells {
                found = Some(i);
                break;
            }
            let n = mats.get_or_insert_with(|| matrices(field, size, &member_lists[ctx]));
            let m = rep_mats
                .entry(r)
                .or_insert_with(|| matrices(field, size, &member_lists[r]));
            *tests += 1;
            let decider = Decider::new(field, size, m, seed)?;
            if decider.decide(n)?.is_some() {
                found = Some(i);
                break;
            }
        }
        let sub = match found {
            Some(i) => i,
            None => {
                list.push(ctx);
                list.len() - 1
            }
        };
        labels.push((bucket as u64) << 32 | sub as u64);
    }
    Ok(labels)
}

/// Coarsest partition of `A^k` refining atomic types in which tuples of one class induce
/// simultaneously similar indicator families over every `F_p`, `p` in `primes`, for every
/// injective `γ: [2m] -> [k]`, `m = floor(k/2)`.
pub fn im_refine(s: &Structure, k: usize, primes: &[u64]) -> Result<ImPartition> {
    refine(s, k, primes, None, 0)
}

/// [`im_refine`] with an explicit seed for the randomized similarity tests.
pub fn im_refine_seeded(s: &Structure, k: usize, primes: &[u64], seed: u64) -> Result<ImPartition> {
    refine(s, k, primes, None, seed)
}

/// Refinement of the disjoint union `A ⊎ B` (with `A = 0..split`) comparing the two
/// structures: a tuple inside one side substitutes elements of its own side, any other
/// tuple elements of the whole union.
pub fn im_refine_pair(union: &Structure, split: usize, k: usize, primes: &[u64]) -> Result<ImPartition> {
    if split > union.n() {
        return Err(Error::ShapeMismatch(format!("split {split} beyond {} elements", union.n())));
    }
    refine(union, k, primes, Some(split), 0)
}

fn refine(s: &Structure, k: usize, primes: &[u64], split: Option<usize>, seed: u64) -> Result<ImPartition> {
    if k < 2 {
        return Err(Error::ShapeMismatch("invertible-map refinement needs k >= 2".into()));
    }
    let fields: Vec<PrimeField> = primes.iter().map(|&p| PrimeField::new(p)).collect::<Result<_>>()?;
    let n = s.n();
    let count = tuple_count(n, k, "invertible-map refinement")?;
    let m = k / 2;
    if n.checked_pow(m as u32).is_none_or(|x| x > MATRIX_LIMIT) {
        return Err(Error::BudgetExceeded {
            what: format!("indicator matrices over {n}^{m} indices"),
            required: (n as u128).pow(m as u32),
            budget: MATRIX_LIMIT as u128,
        });
    }
    let gammas = injections(k, 2 * m);
    let atomic = atomic_types(s, k)?;
    let mut colors = atomic.colors().to_vec();
    let mut classes = atomic.num_classes();
    let mut class_counts = vec![classes];
    let mut rounds = 0;
    let mut tests = 0;
    if fields.is_empty() {
        return Ok(ImPartition {
            k,
            primes: primes.to_vec(),
            classes: atomic,
            rounds,
            class_counts,
            similarity_tests: tests,
        });
    }
    let domains: Vec<Range<usize>> = match split {
        None => vec![0..n],
        Some(a) => vec![0..n, 0..a, a..n],
    };
    // Domain of every tuple: its side when it lies inside one, else the whole union.
    let mut tuple = vec![0usize; k];
    let kind: Vec<u8> = (0..count)
        .map(|idx| {
            let mut rem = idx;
            for slot in tuple.iter_mut().rev() {
                *slot = rem % n;
                rem /= n;
            }
            match split {
                Some(a) if tuple.iter().all(|&x| x < a) => 1,
                Some(a) if tuple.iter().all(|&x| x >= a) => 2,
                _ => 0,
            }
        })
        .collect();
    loop {
        rounds += 1;
        // Lexicographic ranks of (colour, label per γ and prime), one component at a time.
        let mut cur = colors.clone();
        let mut new_classes = classes;
        for gamma in &gammas {
            let rest: Vec<usize> = (0..k).filter(|p| !gamma.contains(p)).collect();
            let mut fams = Vec::new();
            let mut offsets = Vec::new();
            for dom in &domains {
                offsets.push(fams.len());
                domain_families(&colors, n, k, m, gamma, dom.clone(), &mut fams);
            }
            for &field in &fields {
                let labels = group_contexts(&fams, field, seed, &mut tests)?;
                let pairs: Vec<u128> = (0..count)
                    .map(|idx| {
                        let kd = kind[idx] as usize;
                        let dom = &domains[kd];
                        let ctx = rest.iter().fold(0, |acc, &p| {
                            acc * dom.len() + (idx / n.pow((k - 1 - p) as u32)) % n - dom.start
                        });
                        (cur[idx] as u128) << 64 | labels[offsets[kd] + ctx] as u128
                    })
                    .collect();
                (cur, new_classes) = canonical_ranks_u128(&pairs);
            }
        }
        let new_colors = cur;
        let stable = new_classes == classes;
        colors = new_colors;
        classes = new_classes;
        class_counts.push(classes);
        if stable {
            break;
        }
    }
    Ok(ImPartition {
        k,
        primes: primes.to_vec(),
        classes: TupleColoring::from_labels(n, k, &colors),
        rounds,
        class_counts,
        similarity_tests: tests,
    })
}

/// Compares the structures through the refinement of their disjoint union with side-local
/// substitution: equivalent iff every class has equal tuple counts from both sides.
pub fn im_equivalent(a: &Structure, b: &Structure, k: usize, primes: &[u64]) -> Result<bool> {
    let union = Structure::disjoint_union(a, b)?;
    let p = im_refine_pair(&union, a.n(), k, primes)?;
    let (left, right) = side_counts(&p.classes, a.n());
    Ok(left == right)
}

/// Comparison of the invertible-map partition with the automorphism orbits on `k`-tuples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitComparison {
    pub im_classes: usize,
    pub orbits: usize,
    /// Orbits meeting more than one class; always 0.
    pub split_orbits: usize,
    /// Classes containing more than one orbit.
    pub merged_classes: usize,
}

impl OrbitComparison {
    pub fn exact(&self) -> bool {
        self.split_orbits == 0 && self.merged_classes == 0
    }

    pub fn report(&self) -> String {
        format!(
            "im-classes {}\norbits {}\nsplit-orbits {}\nmerged-classes {}\norbit-recovery: {}\n",
            self.im_classes,
            self.orbits,
            self.split_orbits,
            self.merged_classes,
            self.exact()
        )
    }
}

pub fn compare_with_orbits(classes: &TupleColoring, orbits: &TupleColoring) -> OrbitComparison {
    let mut class_of_orbit: Vec<Option<u32>> = vec![None; orbits.num_classes()];
    let mut split = vec![false; orbits.num_classes()];
    let mut orbits_in_class: Vec<Vec<u32>> = vec![Vec::new(); classes.num_classes()];
    for (&o, &c) in orbits.colors().iter().zip(classes.colors()) {
        match class_of_orbit[o as usize] {
            None => {
                class_of_orbit[o as usize] = Some(c);
                orbits_in_class[c as usize].push(o);
            }
            Some(prev) if prev != c => split[o as usize] = true,
            _ => {}
        }
    }
    OrbitComparison {
        im_classes: classes.num_classes(),
        orbits: orbits.num_classes(),
        split_orbits: split.iter().filter(|&&s| s).count(),
        merged_classes: orbits_in_class.iter().filter(|v| v.len() > 1).count(),
    }
}

pub fn im_orbit_check(s: &CfiStructure, k: usize, primes: &[u64]) -> Result<OrbitComparison> {
    let p = im_refine(&s.to_structure(), k, primes)?;
    let orbits = s.orbit_partition(k)?;
    Ok(compare_with_orbits(&p.classes, &orbits))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::{OrderedGraph, SimpleGraph};

    #[test]
    fn injection_counts() {
        assert_eq!(injections(3, 2).len(), 6);
        assert_eq!(injections(4, 4).len(), 24);
    }

    #[test]
    fn no_primes_gives_atomic_types() {
        let s = Structure::from_graph(&SimpleGraph::path(4));
        let p = im_refine(&s, 2, &[]).unwrap();
        assert!(p.classes.same_partition(&atomic_types(&s, 2).unwrap()));
        assert_eq!(p.rounds, 0);
    }

    #[test]
    fn isomorphic_copies_equivalent() {
        let g = SimpleGraph::cycle(5);
        let a = Structure::from_graph(&g);
        let b = a.relabel(&[2, 4, 1, 0, 3]).unwrap();
        assert!(im_equivalent(&a, &b, 2, &[2]).unwrap());
    }

    #[test]
    fn cycles_distinguished() {
        let c6 = Structure::from_graph(&SimpleGraph::cycle(6));
        let two_triangles = Structure::from_graph(
            &SimpleGraph::new(6, vec![(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap(),
        );
        assert!(!im_equivalent(&c6, &two_triangles, 3, &[2]).unwrap());
    }

    #[test]
    fn orbits_never_split() {
        let s = CfiStructure::build(OrderedGraph::catalog("K4").unwrap(), 2, &[0; 4]).unwrap();
        let c = im_orbit_check(&s, 2, &[2]).unwrap();
        assert_eq!(c.split_orbits, 0);
    }
}
