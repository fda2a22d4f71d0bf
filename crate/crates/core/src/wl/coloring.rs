use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Canonical per-class descriptor: class size plus the id of the class's ancestor
/// in every refinement round (round 0 first).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClassDescriptor {
    pub size: usize,
    pub history: Vec<u32>,
}

/// Partition of `A^k` into numbered classes. Tuples are indexed in lexicographic
/// order, first component most significant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TupleColoring {
    n: usize,
    k: usize,
    colors: Vec<u32>,
    descriptors: Vec<ClassDescriptor>,
}

pub(crate) const TUPLE_BUDGET: u128 = 1 << 23;

pub(crate) fn tuple_count(n: usize, k: usize, what: &str) -> Result<usize> {
    let required = (n as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    if required > TUPLE_BUDGET {
        return Err(Error::BudgetExceeded {
            what: format!("{what}: {n}^{k} tuples"),
            required,
            budget: TUPLE_BUDGET,
        });
    }
    Ok(required as usize)
}

impl TupleColoring {
    /// Builds a coloring whose class ids are `0..c` with descriptors indexed by id.
    pub(crate) fn from_parts(n: usize, k: usize, colors: Vec<u32>, descriptors: Vec<ClassDescriptor>) -> Self {
        debug_assert_eq!(colors.len(), n.pow(k as u32));
        TupleColoring {
            n,
            k,
            colors,
            descriptors,
        }
    }

    /// Renumbers arbitrary labels by first appearance in tuple order.
    pub fn from_labels<T: std::hash::Hash + Eq>(n: usize, k: usize, labels: &[T]) -> Self {
        let mut ids: HashMap<&T, u32> = HashMap::new();
        let colors: Vec<u32> = labels
            .iter()
            .map(|l| {
                let next = ids.len() as u32;
                *ids.entry(l).or_insert(next)
            })
            .collect();
        let mut sizes = vec![0usize; ids.len()];
        colors.iter().for_each(|&c| sizes[c as usize] += 1);
        let descriptors = sizes
            .into_iter()
            .enumerate()
            .map(|(i, size)| ClassDescriptor {
                size,
                history: vec![i as u32],
            })
            .collect();
        TupleColoring::from_parts(n, k, colors, descriptors)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn num_classes(&self) -> usize {
        self.descriptors.len()
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    pub fn descriptors(&self) -> &[ClassDescriptor] {
        &self.descriptors
    }

    pub fn tuple_index(&self, t: &[usize]) -> usize {
        debug_assert_eq!(t.len(), self.k);
        t.iter().fold(0, |acc, &x| acc * self.n + x)
    }

    pub fn tuple_at(&self, mut idx: usize) -> Vec<usize> {
        let mut t = vec![0; self.k];
        for slot in t.iter_mut().rev() {
            *slot = idx % self.n;
            idx /= self.n;
        }
        t
    }

    pub fn class_of(&self, t: &[usize]) -> u32 {
        self.colors[self.tuple_index(t)]
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        self.descriptors.iter().map(|d| d.size).collect()
    }

    /// Tuple indices per class, each list increasing.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_classes()];
        for (i, &c) in self.colors.iter().enumerate() {
            out[c as usize].push(i);
        }
        out
    }

    /// Every class of `self` lies inside a class of `other`.
    pub fn refines(&self, other: &TupleColoring) -> bool {
        if self.colors.len() != other.colors.len() {
            return false;
        }
        let mut image = vec![u32::MAX; self.num_classes()];
        self.colors.iter().zip(&other.colors).all(|(&a, &b)| {
            let slot = &mut image[a as usize];
            if *slot == u32::MAX {
                *slot = b;
            }
            *slot == b
        })
    }

    /// Same partition, ids ignored.
    pub fn same_partition(&self, other: &TupleColoring) -> bool {
        self.num_classes() == other.num_classes() && self.refines(other)
    }

    /// Partition of `l`-tuples given by the class of the padded tuple
    /// `(a_1, .., a_l, a_l, .., a_l)`; ids keep the relative order of the source ids.
    pub fn restrict(&self, l: usize) -> TupleColoring {
        assert!(l >= 1 && l <= self.k, "restriction arity out of range");
        let count = self.n.pow(l as u32);
        let raw: Vec<u32> = (0..count)
            .map(|idx| {
                let mut t = vec![0; self.k];
                let mut rest = idx;
                for slot in t[..l].iter_mut().rev() {
                    *slot = rest % self.n;
                    rest /= self.n;
                }
                for j in l..self.k {
                    t[j] = t[l - 1];
                }
                self.class_of(&t)
            })
            .collect();
        let mut used: Vec<u32> = raw.clone();
        used.sort_unstable();
        used.dedup();
        let colors = raw
            .iter()
            .map(|c| used.binary_search(c).expect("present") as u32)
            .collect::<Vec<_>>();
        let mut descriptors: Vec<ClassDescriptor> = used
            .iter()
            .map(|&c| ClassDescriptor {
                size: 0,
                history: self.descriptors[c as usize].history.clone(),
            })
            .collect();
        colors.iter().for_each(|&c| descriptors[c as usize].size += 1);
        TupleColoring::from_parts(self.n, l, colors, descriptors)
    }

    /// Lines `class <ordinal> size <n>`; with `verbose`, each class is followed by its
    /// tuples in lexicographic order, one per line, indented by two spaces.
    pub fn report(&self, verbose: bool) -> String {
        let mut out = String::new();
        let members = verbose.then(|| self.classes());
        for (i, d) in self.descriptors.iter().enumerate() {
            writeln!(out, "class {i} size {}", d.size).expect("write to string");
            if let Some(members) = &members {
                for &idx in &members[i] {
                    let t: Vec<String> = self.tuple_at(idx).iter().map(|x| x.to_string()).collect();
                    writeln!(out, "  {}", t.join(" ")).expect("write to string");
                }
            }
        }
        out
    }
}
