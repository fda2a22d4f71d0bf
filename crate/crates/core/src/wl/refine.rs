use rustc_hash::FxHashMap;

use super::coloring::{tuple_count, ClassDescriptor, TupleColoring};
use crate::error::Result;
use crate::structures::Structure;

// Colors and multiset ids are below the tuple budget 2^23.
const FIELD_BITS: usize = 23;

/// Ranks of `u128` keys, interned through a hash map before sorting the distinct keys.
pub(crate) fn canonical_ranks_u128(keys: &[u128]) -> (Vec<u32>, usize) {
    let mut index: FxHashMap<u128, u32> = FxHashMap::default();
    let mut reps: Vec<u128> = Vec::new();
    let first: Vec<u32> = keys
        .iter()
        .map(|&k| {
            *index.entry(k).or_insert_with(|| {
                reps.push(k);
                reps.len() as u32 - 1
            })
        })
        .collect();
    let mut order: Vec<u32> = (0..reps.len() as u32).collect();
    order.sort_unstable_by_key(|&o| reps[o as usize]);
    let mut rank = vec![0u32; reps.len()];
    for (r, &o) in order.iter().enumerate() {
        rank[o as usize] = r as u32;
    }
    (first.iter().map(|&i| rank[i as usize]).collect(), reps.len())
}

/// Ranks of variable-length keys, interned through a hash map first.
pub(crate) fn canonical_ranks_of_slices(keys: &[u64], width: usize) -> (Vec<u32>, usize) {
    let count = if width == 0 { 0 } else { keys.len() / width };
    let mut index: FxHashMap<&[u64], u32> = FxHashMap::default();
    let mut first: Vec<u32> = Vec::with_capacity(count);
    let mut reps: Vec<&[u64]> = Vec::new();
    for i in 0..count {
        let key = &keys[i * width..(i + 1) * width];
        let next = reps.len() as u32;
        let id = *index.entry(key).or_insert_with(|| {
            reps.push(key);
            next
        });
        first.push(id);
    }
    let mut order: Vec<u32> = (0..reps.len() as u32).collect();
    order.sort_unstable_by(|&a, &b| reps[a as usize].cmp(reps[b as usize]));
    let mut rank = vec![0u32; reps.len()];
    for (r, &o) in order.iter().enumerate() {
        rank[o as usize] = r as u32;
    }
    (first.iter().map(|&i| rank[i as usize]).collect(), reps.len())
}

fn decode(mut idx: usize, n: usize, t: &mut [usize]) {
    for slot in t.iter_mut().rev() {
        *slot = idx % n;
        idx /= n;
    }
}

/// Atomic types of `A^k`: equalities among components and relation memberships of all
/// component subtuples. Class ids are ranks of canonical type keys.
pub fn atomic_types(s: &Structure, k: usize) -> Result<TupleColoring> {
    assert!(k >= 1, "arity must be positive");
    let n = s.n();
    let count = tuple_count(n, k, "atomic types")?;
    let base = s.relations().iter().map(|r| r.arity()).max().unwrap_or(0).max(2);
    if k > base {
        return atomic_from_subtuples(s, k, base, count);
    }
    let maps: Vec<Vec<Vec<usize>>> = s
        .relations()
        .iter()
        .map(|r| {
            let total = k.pow(r.arity() as u32);
            (0..total)
                .map(|m| {
                    let mut mu = vec![0; r.arity()];
                    decode(m, k, &mut mu);
                    mu
                })
                .collect()
        })
        .collect();
    let bits = k * (k - 1) / 2 + maps.iter().map(Vec::len).sum::<usize>();
    let width = bits.div_ceil(64).max(1);
    let mut keys = vec![0u64; count * width];
    let mut t = vec![0usize; k];
    let mut sub = vec![0u32; 3];
    for idx in 0..count {
        decode(idx, n, &mut t);
        let key = &mut keys[idx * width..(idx + 1) * width];
        let mut bit = 0;
        let mut set = |on: bool, bit: &mut usize| {
            if on {
                key[*bit / 64] |= 1 << (*bit % 64);
            }
            *bit += 1;
        };
        for i in 0..k {
            for j in i + 1..k {
                set(t[i] == t[j], &mut bit);
            }
        }
        for (r, rmaps) in s.relations().iter().zip(&maps) {
            sub.resize(r.arity(), 0);
            for mu in rmaps {
                for (slot, &pos) in sub.iter_mut().zip(mu) {
                    *slot = t[pos] as u32;
                }
                set(r.contains(&sub), &mut bit);
            }
        }
    }
    let (colors, classes) = canonical_ranks_of_slices(&keys, width);
    Ok(with_history(n, k, colors, classes, &[]))
}

/// For `k` above every relation arity, the atomic type of a tuple is determined by the
/// atomic types of its increasing `base`-position subtuples.
fn atomic_from_subtuples(s: &Structure, k: usize, base: usize, count: usize) -> Result<TupleColoring> {
    let n = s.n();
    let sub = atomic_types(s, base)?;
    let subsets: Vec<Vec<usize>> = (0..1usize << k)
        .filter(|m| m.count_ones() as usize == base)
        .map(|m| (0..k).filter(|i| m >> i & 1 == 1).collect())
        .collect();
    let width = subsets.len();
    let mut keys = vec![0u64; count * width];
    let mut t = vec![0usize; k];
    for idx in 0..count {
        decode(idx, n, &mut t);
        for (w, positions) in subsets.iter().enumerate() {
            let sidx = positions.iter().fold(0, |acc, &p| acc * n + t[p]);
            keys[idx * width + w] = sub.colors()[sidx] as u64;
        }
    }
    let (colors, classes) = canonical_ranks_of_slices(&keys, width);
    Ok(with_history(n, k, colors, classes, &[]))
}

/// Builds descriptors from final colors and per-round parent maps (`parents[r][id]` is
/// the id in round `r` of the class with id `id` in round `r + 1`).
fn with_history(n: usize, k: usize, colors: Vec<u32>, classes: usize, parents: &[Vec<u32>]) -> TupleColoring {
    let mut descriptors: Vec<ClassDescriptor> = (0..classes)
        .map(|c| {
            let mut history = vec![c as u32];
            let mut cur = c as u32;
            for round in parents.iter().rev() {
                cur = round[cur as usize];
                history.push(cur);
            }
            history.reverse();
            ClassDescriptor { size: 0, history }
        })
        .collect();
    colors.iter().for_each(|&c| descriptors[c as usize].size += 1);
    TupleColoring::from_parts(n, k, colors, descriptors)
}

fn parent_map(old: &[u32], new: &[u32], classes: usize) -> Vec<u32> {
    let mut parent = vec![0u32; classes];
    for (&o, &c) in old.iter().zip(new) {
        parent[c as usize] = o;
    }
    parent
}

/// Stable `k`-WL coloring of `A^k`.
///
/// For `k = 1` this is colour refinement: each element collects the multiset of
/// (atomic type of the pair, color) over all partners. For `k >= 2` each tuple collects, per
/// position `j`, the multiset of colors of the tuples obtained by substituting every element
/// at `j`. New ids are the ranks of the sorted signatures, so ids are canonical.
pub fn wl_refine(s: &Structure, k: usize) -> Result<TupleColoring> {
    if k == 1 {
        return colour_refinement(s);
    }
    let n = s.n();
    let count = tuple_count(n, k, "k-WL refinement")?;
    let atomic = atomic_types(s, k)?;
    let mut colors = atomic.colors().to_vec();
    let mut classes = atomic.num_classes();
    let mut parents: Vec<Vec<u32>> = Vec::new();
    let contexts = count / n.max(1);
    let packed = (k + 1) * FIELD_BITS <= 128;
    loop {
        let mut ms_ids: Vec<Vec<u32>> = Vec::with_capacity(k);
        let mut buf = vec![0u32; n];
        for j in 0..k {
            let stride = n.pow((k - 1 - j) as u32);
            let mut multisets: Vec<u64> = Vec::with_capacity(contexts * n);
            for ctx in 0..contexts {
                let base = (ctx / stride) * stride * n + ctx % stride;
                for (b, slot) in buf.iter_mut().enumerate() {
                    *slot = colors[base + b * stride];
                }
                buf.sort_unstable();
                multisets.extend(buf.iter().map(|&x| x as u64));
            }
            ms_ids.push(canonical_ranks_of_slices(&multisets, n).0);
        }
        let ctx_of = |idx: usize, j: usize| {
            let stride = n.pow((k - 1 - j) as u32);
            (idx / (stride * n)) * stride + idx % stride
        };
        let (new_colors, new_classes) = if packed {
            let keys: Vec<u128> = (0..count)
                .map(|idx| {
                    (0..k).fold(colors[idx] as u128, |acc, j| {
                        acc << FIELD_BITS | ms_ids[j][ctx_of(idx, j)] as u128
                    })
                })
                .collect();
            canonical_ranks_u128(&keys)
        } else {
            let mut keys = Vec::with_capacity(count * (k + 1));
            for idx in 0..count {
                keys.push(colors[idx] as u64);
                keys.extend((0..k).map(|j| ms_ids[j][ctx_of(idx, j)] as u64));
            }
            canonical_ranks_of_slices(&keys, k + 1)
        };
        parents.push(parent_map(&colors, &new_colors, new_classes));
        let stable = new_classes == classes;
        colors = new_colors;
        classes = new_classes;
        if stable {
            break;
        }
    }
    Ok(with_history(n, k, colors, classes, &parents))
}

fn colour_refinement(s: &Structure) -> Result<TupleColoring> {
    let n = s.n();
    let pairs = atomic_types(s, 2)?;
    let pair_types = pairs.colors();
    let mut colors = atomic_types(s, 1)?.colors().to_vec();
    let mut classes = colors.iter().copied().max().map_or(0, |c| c as usize + 1);
    let mut parents = Vec::new();
    loop {
        let width = 1 + n;
        let mut keys = vec![0u64; n * width];
        for a in 0..n {
            let row = &mut keys[a * width..(a + 1) * width];
            row[0] = colors[a] as u64;
            for b in 0..n {
                row[1 + b] = (pair_types[a * n + b] as u64) << 32 | colors[b] as u64;
            }
            row[1..].sort_unstable();
        }
        let (new_colors, new_classes) = canonical_ranks_of_slices(&keys, width);
        parents.push(parent_map(&colors, &new_colors, new_classes));
        let stable = new_classes == classes;
        colors = new_colors;
        classes = new_classes;
        if stable {
            break;
        }
    }
    Ok(with_history(n, 1, colors, classes, &parents))
}

/// Per-class counts of tuples lying entirely in `0..split` and entirely in `split..n`.
pub(crate) fn side_counts(c: &TupleColoring, split: usize) -> (Vec<usize>, Vec<usize>) {
    let mut left = vec![0; c.num_classes()];
    let mut right = vec![0; c.num_classes()];
    let mut t = vec![0; c.k()];
    for (idx, &col) in c.colors().iter().enumerate() {
        decode(idx, c.n(), &mut t);
        if t.iter().all(|&x| x < split) {
            left[col as usize] += 1;
        } else if t.iter().all(|&x| x >= split) {
            right[col as usize] += 1;
        }
    }
    (left, right)
}

/// Runs `k`-WL on the disjoint union and compares per-class tuple counts of the two sides.
pub fn wl_equivalent(a: &Structure, b: &Structure, k: usize) -> Result<bool> {
    let union = Structure::disjoint_union(a, b)?;
    let c = wl_refine(&union, k)?;
    let (left, right) = side_counts(&c, a.n());
    Ok(left == right)
}

/// Class descriptors in class order.
pub fn counting_type_order(c: &TupleColoring) -> Vec<ClassDescriptor> {
    c.descriptors().to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::SimpleGraph;

    fn graph(g: SimpleGraph) -> Structure {
        Structure::from_graph(&g)
    }

    #[test]
    fn atomic_type_examples() {
        let tri = graph(SimpleGraph::complete(3));
        assert_eq!(atomic_types(&tri, 1).unwrap().num_classes(), 1);
        assert_eq!(atomic_types(&tri, 2).unwrap().num_classes(), 2);
        let set = Structure::new(4);
        assert_eq!(atomic_types(&set, 2).unwrap().num_classes(), 2);
    }

    #[test]
    fn colour_refinement_examples() {
        assert_eq!(wl_refine(&graph(SimpleGraph::cycle(6)), 1).unwrap().num_classes(), 1);
        let p3 = wl_refine(&graph(SimpleGraph::path(3)), 1).unwrap();
        assert_eq!(p3.num_classes(), 2);
        assert_eq!(p3.class_of(&[0]), p3.class_of(&[2]));
    }

    #[test]
    fn c6_versus_two_triangles() {
        let c6 = graph(SimpleGraph::cycle(6));
        let two = graph(
            SimpleGraph::new(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap(),
        );
        assert!(wl_equivalent(&c6, &two, 1).unwrap());
        assert!(wl_equivalent(&c6, &two, 2).unwrap());
        assert!(!wl_equivalent(&c6, &two, 3).unwrap());
    }

    #[test]
    fn refines_atomic_types_and_is_deterministic() {
        let p4 = graph(SimpleGraph::path(4));
        let at = atomic_types(&p4, 2).unwrap();
        let w = wl_refine(&p4, 2).unwrap();
        assert!(w.refines(&at));
        assert_eq!(w, wl_refine(&p4, 2).unwrap());
        assert_eq!(counting_type_order(&w).len(), w.num_classes());
    }

    #[test]
    fn order_invariant_under_relabeling() {
        let g = SimpleGraph::new(5, [(0, 1), (1, 2), (2, 3), (1, 4)]).unwrap();
        let s = graph(g.clone());
        let perm = [3, 0, 4, 1, 2];
        let t = graph(g.relabel(&perm).unwrap());
        for k in 1..=3 {
            let a = wl_refine(&s, k).unwrap();
            let b = wl_refine(&t, k).unwrap();
            assert_eq!(counting_type_order(&a), counting_type_order(&b), "k = {k}");
        }
    }
}
