use std::collections::HashSet;

use super::graph::{check_permutation, SimpleGraph};
use crate::error::{Error, Result};

const BITMAP_LIMIT: u128 = 1 << 26;

#[derive(Clone, Debug)]
enum Membership {
    Bitmap(Vec<u64>),
    Hashed(HashSet<Vec<u32>>),
}

/// One named relation of fixed arity over `0..n`.
#[derive(Clone, Debug)]
pub struct Relation {
    name: String,
    arity: usize,
    tuples: Vec<Vec<u32>>,
    n: usize,
    membership: Membership,
}

impl PartialEq for Relation {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.arity == other.arity && self.tuples == other.tuples
    }
}

impl Eq for Relation {}

impl Relation {
    fn new(name: String, arity: usize, n: usize, mut tuples: Vec<Vec<u32>>) -> Result<Self> {
        if let Some(t) = tuples.iter().find(|t| t.len() != arity || t.iter().any(|&x| x as usize >= n)) {
            return Err(Error::ShapeMismatch(format!(
                "tuple {t:?} does not fit relation `{name}` of arity {arity} over {n} elements"
            )));
        }
        tuples.sort_unstable();
        tuples.dedup();
        let cells = (n as u128).pow(arity as u32);
        let membership = if cells <= BITMAP_LIMIT {
            let mut bits = vec![0u64; (cells as usize).div_ceil(64)];
            for t in &tuples {
                let i = encode(t, n);
                bits[i / 64] |= 1 << (i % 64);
            }
            Membership::Bitmap(bits)
        } else {
            Membership::Hashed(tuples.iter().cloned().collect())
        };
        Ok(Relation {
            name,
            arity,
            tuples,
            n,
            membership,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Member tuples in lexicographic order.
    pub fn tuples(&self) -> &[Vec<u32>] {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn contains(&self, t: &[u32]) -> bool {
        match &self.membership {
            Membership::Bitmap(bits) => {
                let i = encode(t, self.n);
                bits[i / 64] >> (i % 64) & 1 == 1
            }
            Membership::Hashed(set) => set.contains(t),
        }
    }
}

fn encode(t: &[u32], n: usize) -> usize {
    t.iter().fold(0usize, |acc, &x| acc * n + x as usize)
}

/// Finite relational structure with universe `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Structure {
    n: usize,
    relations: Vec<Relation>,
}

impl Structure {
    pub fn new(n: usize) -> Self {
        Structure {
            n,
            relations: Vec::new(),
        }
    }

    /// Adds a relation; names must be unique.
    pub fn with_relation(mut self, name: &str, arity: usize, tuples: Vec<Vec<u32>>) -> Result<Self> {
        if self.relations.iter().any(|r| r.name == name) {
            return Err(Error::SignatureMismatch(format!("duplicate relation `{name}`")));
        }
        self.relations
            .push(Relation::new(name.to_string(), arity, self.n, tuples)?);
        Ok(self)
    }

    /// Graph as a structure with one symmetric binary relation `E`.
    pub fn from_graph(g: &SimpleGraph) -> Self {
        let tuples = g
            .edges()
            .iter()
            .flat_map(|&(u, v)| [vec![u as u32, v as u32], vec![v as u32, u as u32]])
            .collect();
        Structure::new(g.n())
            .with_relation("E", 2, tuples)
            .expect("edges in range")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn relation(&self, name: &str) -> Option<&Relation> {
        self.relations.iter().find(|r| r.name == name)
    }

    /// `(name, arity)` per relation, in declaration order.
    pub fn signature(&self) -> Vec<(&str, usize)> {
        self.relations.iter().map(|r| (r.name.as_str(), r.arity)).collect()
    }

    pub fn check_same_signature(&self, other: &Structure) -> Result<()> {
        if self.signature() != other.signature() {
            return Err(Error::SignatureMismatch(format!(
                "{:?} vs {:?}",
                self.signature(),
                other.signature()
            )));
        }
        Ok(())
    }

    /// Renames element `x` to `perm[x]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Structure> {
        check_permutation(perm, self.n)?;
        let mut out = Structure::new(self.n);
        for r in &self.relations {
            let tuples = r
                .tuples
                .iter()
                .map(|t| t.iter().map(|&x| perm[x as usize] as u32).collect())
                .collect();
            out = out.with_relation(&r.name, r.arity, tuples)?;
        }
        Ok(out)
    }

    /// Whether `x -> perm[x]` maps `self` onto `other`.
    pub fn is_isomorphism(&self, other: &Structure, perm: &[usize]) -> bool {
        self.n == other.n
            && self.signature() == other.signature()
            && check_permutation(perm, self.n).is_ok()
            && self.relabel(perm).map(|s| s == *other).unwrap_or(false)
    }

    /// Universe `0..|a|` followed by `|a|..|a|+|b|`.
    pub fn disjoint_union(a: &Structure, b: &Structure) -> Result<Structure> {
        a.check_same_signature(b)?;
        let shift = a.n as u32;
        let mut out = Structure::new(a.n + b.n);
        for (ra, rb) in a.relations.iter().zip(&b.relations) {
            let mut tuples = ra.tuples.clone();
            tuples.extend(
                rb.tuples
                    .iter()
                    .map(|t| t.iter().map(|&x| x + shift).collect()),
            );
            out = out.with_relation(&ra.name, ra.arity, tuples)?;
        }
        Ok(out)
    }

    /// `a` plus apex `|a|`, then `b` shifted by `|a| + 1` plus apex `|a| + |b| + 1`;
    /// a fresh binary relation relates each apex to every element of its own side.
    pub fn pointed_union(a: &Structure, b: &Structure) -> Result<Structure> {
        a.check_same_signature(b)?;
        let mut name = String::from("apex");
        while a.relation(&name).is_some() {
            name.push('\'');
        }
        let pa = Structure::new(a.n + 1);
        let pb = Structure::new(b.n + 1);
        let mut pa = a.relations.iter().try_fold(pa, |s, r| {
            s.with_relation(&r.name, r.arity, r.tuples.clone())
        })?;
        let mut pb = b.relations.iter().try_fold(pb, |s, r| {
            s.with_relation(&r.name, r.arity, r.tuples.clone())
        })?;
        let apex = |side: usize| (0..side as u32).map(move |x| vec![side as u32, x]).collect();
        pa = pa.with_relation(&name, 2, apex(a.n))?;
        pb = pb.with_relation(&name, 2, apex(b.n))?;
        Structure::disjoint_union(&pa, &pb)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Structure {
        Structure::from_graph(&SimpleGraph::complete(3))
    }

    #[test]
    fn membership() {
        let t = triangle();
        let e = t.relation("E").unwrap();
        assert_eq!(e.len(), 6);
        assert!(e.contains(&[0, 2]));
        assert!(!e.contains(&[1, 1]));
    }

    #[test]
    fn pointed_union_shape() {
        let a = triangle();
        let b = Structure::from_graph(&SimpleGraph::path(3));
        let u = Structure::pointed_union(&a, &b).unwrap();
        assert_eq!(u.n(), 3 + 3 + 2);
        let apex = u.relation("apex").unwrap();
        assert_eq!(apex.tuples().iter().filter(|t| t[0] == 3).count(), 3);
        assert_eq!(apex.tuples().iter().filter(|t| t[0] == 7).count(), 3);
    }

    #[test]
    fn pointed_union_of_isomorphic_sides_has_swap() {
        let a = triangle();
        let u = Structure::pointed_union(&a, &a).unwrap();
        let swap: Vec<usize> = (0..8).map(|x| (x + 4) % 8).collect();
        assert!(u.is_isomorphism(&u, &swap));
    }

    #[test]
    fn signature_mismatch_rejected() {
        let a = triangle();
        let b = Structure::new(2);
        assert!(matches!(
            Structure::disjoint_union(&a, &b),
            Err(Error::SignatureMismatch(_))
        ));
    }
}
