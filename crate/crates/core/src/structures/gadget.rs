//! Plain-graph encoding of CFI structures.
//!
//! Layout of `cfi_to_graph` (with `m` directed edges and prime `p`):
//!
//! - one node per element `(e, x)`;
//! - an order path `P_0 - P_1 - ... - P_{m-1}`, with `P_i` adjacent to the `p` elements of
//!   the `i`-th edge class, and a start marker `P_0 - z1 - z2`;
//! - one node per unordered `I`-pair, adjacent to both elements;
//! - one node per `R`-triple, adjacent to its three elements;
//! - per `C`-pair `a -> b`: nodes `s`, `t`, `leaf` with edges `a - s - t - b` and `s - leaf`.
//!
//! Elements have degree `p + 4`, path nodes at most `p + 2`, every other node at most 3,
//! so the maximum degree is at most `2 p^2`.

use std::collections::BTreeMap;

use super::cfi::CfiStructure;
use super::graph::{OrderedGraph, SimpleGraph};
use crate::error::{Error, Result};

/// Explicit constant `c` in the degree bound `c * p^2`.
pub const DEGREE_CONSTANT: usize = 2;

pub fn cfi_to_graph(s: &CfiStructure) -> SimpleGraph {
    let p = s.p();
    let f = s.field();
    let g = s.graph();
    let m = g.directed_count();
    let elements = m * p as usize;
    let path = |i: usize| elements + i;
    let mut next = elements + m;
    let mut edges = Vec::new();
    for i in 0..m {
        if i + 1 < m {
            edges.push((path(i), path(i + 1)));
        }
        for x in 0..p {
            edges.push((path(i), s.element(i, x)));
        }
    }
    let (z1, z2) = (next, next + 1);
    next += 2;
    edges.push((path(0), z1));
    edges.push((z1, z2));
    for e in 0..m {
        let d = g.dual(e);
        if e < d {
            for x in 0..p {
                edges.push((next, s.element(e, x)));
                edges.push((next, s.element(d, f.neg(x))));
                next += 1;
            }
        }
    }
    for v in 0..g.n() {
        let [e1, e2, e3] = g.out_edges(v);
        for x1 in 0..p {
            for x2 in 0..p {
                let x3 = f.sub(s.load()[v], f.add(x1, x2));
                for a in [s.element(e1, x1), s.element(e2, x2), s.element(e3, x3)] {
                    edges.push((next, a));
                }
                next += 1;
            }
        }
    }
    for e in 0..m {
        for x in 0..p {
            let (sn, tn, leaf) = (next, next + 1, next + 2);
            next += 3;
            edges.push((s.element(e, x), sn));
            edges.push((sn, tn));
            edges.push((tn, s.element(e, f.add(x, 1))));
            edges.push((sn, leaf));
        }
    }
    SimpleGraph::new(next, edges).expect("gadget graph is simple")
}

fn malformed(msg: impl Into<String>) -> Error {
    Error::MalformedEncoding(msg.into())
}

/// Decodes a graph in the image of [`cfi_to_graph`], up to renaming of its nodes.
pub fn graph_to_cfi(graph: &SimpleGraph) -> Result<CfiStructure> {
    let adj = graph.adjacency();
    let deg: Vec<usize> = adj.iter().map(Vec::len).collect();
    let n = graph.n();

    let markers: Vec<usize> = (0..n)
        .filter(|&v| deg[v] == 1 && deg[adj[v][0]] == 2)
        .collect();
    let &[z2] = markers.as_slice() else {
        return Err(malformed(format!("expected one start marker, found {}", markers.len())));
    };
    let z1 = adj[z2][0];
    let p0 = *adj[z1]
        .iter()
        .find(|&&w| w != z2)
        .ok_or_else(|| malformed("start marker detached"))?;
    if deg[p0] < 4 {
        return Err(malformed("start of the order path has too small a degree"));
    }
    let p = deg[p0] - 2;
    let elem_deg = p + 4;

    let mut path = vec![p0];
    let mut prev = z1;
    loop {
        let cur = *path.last().expect("nonempty");
        let others: Vec<usize> = adj[cur]
            .iter()
            .copied()
            .filter(|&w| w != prev && deg[w] != elem_deg)
            .collect();
        match others.as_slice() {
            [] => break,
            [nxt] if deg[*nxt] == p + 2 || deg[*nxt] == p + 1 => {
                prev = cur;
                path.push(*nxt);
            }
            _ => return Err(malformed("order path branches")),
        }
        if path.len() > n {
            return Err(malformed("order path does not terminate"));
        }
    }
    let m = path.len();

    let mut class_of = vec![usize::MAX; n];
    let mut classes = Vec::with_capacity(m);
    for (i, &pi) in path.iter().enumerate() {
        let members: Vec<usize> = adj[pi].iter().copied().filter(|&w| deg[w] == elem_deg).collect();
        if members.len() != p {
            return Err(malformed(format!("edge class {i} has {} elements, expected {p}", members.len())));
        }
        for &a in &members {
            if class_of[a] != usize::MAX {
                return Err(malformed("element attached to two path nodes"));
            }
            class_of[a] = i;
        }
        classes.push(members);
    }
    let is_elem = |v: usize| class_of[v] != usize::MAX;

    let mut role_taken = vec![false; n];
    role_taken[z1] = true;
    role_taken[z2] = true;
    for &v in path.iter().chain(classes.iter().flatten()) {
        role_taken[v] = true;
    }
    let mut succ = vec![usize::MAX; n];
    for leaf in (0..n).filter(|&v| deg[v] == 1 && v != z2) {
        let sn = adj[leaf][0];
        if deg[sn] != 3 {
            return Err(malformed("leaf not attached to a cycle gadget"));
        }
        let rest: Vec<usize> = adj[sn].iter().copied().filter(|&w| w != leaf).collect();
        let (a, tn) = match (is_elem(rest[0]), is_elem(rest[1])) {
            (true, false) => (rest[0], rest[1]),
            (false, true) => (rest[1], rest[0]),
            _ => return Err(malformed("cycle gadget has wrong shape")),
        };
        if deg[tn] != 2 {
            return Err(malformed("cycle gadget has wrong shape"));
        }
        let b = *adj[tn].iter().find(|&&w| w != sn).expect("degree 2");
        if !is_elem(b) || class_of[a] != class_of[b] || succ[a] != usize::MAX {
            return Err(malformed("cycle gadget joins unrelated elements"));
        }
        succ[a] = b;
        for v in [leaf, sn, tn] {
            role_taken[v] = true;
        }
    }

    let mut dual = vec![usize::MAX; m];
    let mut i_pairs = Vec::new();
    let mut r_triples = Vec::new();
    for v in (0..n).filter(|&v| !role_taken[v]) {
        if !adj[v].iter().all(|&w| is_elem(w)) {
            return Err(malformed(format!("node {v} has an unrecognized gadget shape")));
        }
        match deg[v] {
            2 => {
                let (a, b) = (adj[v][0], adj[v][1]);
                let (ca, cb) = (class_of[a], class_of[b]);
                for (x, y) in [(ca, cb), (cb, ca)] {
                    if dual[x] != usize::MAX && dual[x] != y || x == y {
                        return Err(malformed("inverse gadgets are inconsistent"));
                    }
                    dual[x] = y;
                }
                i_pairs.push((a, b));
            }
            3 => {
                let mut t = adj[v].clone();
                t.sort_by_key(|&a| class_of[a]);
                r_triples.push(t);
            }
            _ => return Err(malformed(format!("node {v} has an unrecognized gadget shape"))),
        }
    }
    if dual.contains(&usize::MAX) {
        return Err(malformed("edge class without inverse"));
    }

    // Vertices: groups of three classes joined by R-triples, numbered by first class.
    let mut group_of = vec![usize::MAX; m];
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for t in &r_triples {
        let cs: Vec<usize> = t.iter().map(|&a| class_of[a]).collect();
        if cs[0] == cs[1] || cs[1] == cs[2] {
            return Err(malformed("R-gadget repeats an edge class"));
        }
        let key = cs[0];
        match groups.get(&key) {
            Some(existing) if existing != &cs => {
                return Err(malformed("R-gadgets overlap inconsistently"))
            }
            Some(_) => {}
            None => {
                for &c in &cs {
                    if group_of[c] != usize::MAX {
                        return Err(malformed("edge class in two vertex groups"));
                    }
                    group_of[c] = groups.len();
                }
                groups.insert(key, cs);
            }
        }
    }
    if group_of.contains(&usize::MAX) {
        return Err(malformed("edge class not covered by R-gadgets"));
    }
    // BTreeMap keys are first classes, so insertion ids may not follow class order; renumber.
    let order: Vec<usize> = groups.values().map(|cs| group_of[cs[0]]).collect();
    let mut renumber = vec![0; order.len()];
    for (new, &old) in order.iter().enumerate() {
        renumber[old] = new;
    }
    let vertex_of: Vec<usize> = group_of.iter().map(|&g| renumber[g]).collect();
    let mut und = Vec::new();
    for i in 0..m {
        if i < dual[i] {
            und.push((vertex_of[i], vertex_of[dual[i]]));
        }
    }
    let og = OrderedGraph::new(groups.len(), und).map_err(|e| malformed(e.to_string()))?;
    for i in 0..m {
        if og.directed_edges()[i] != (vertex_of[i], vertex_of[dual[i]]) || og.dual(i) != dual[i] {
            return Err(malformed("order path disagrees with the edge order of the graph"));
        }
    }

    let field = crate::gf::PrimeField::new(p as u64).map_err(|e| malformed(e.to_string()))?;
    let mut label = vec![u32::MAX; n];
    for i in (0..m).filter(|&i| i < dual[i]) {
        let mut a = classes[i][0];
        for x in 0..p as u32 {
            if label[a] != u32::MAX {
                return Err(malformed("cycle gadgets do not form a p-cycle"));
            }
            label[a] = x;
            a = succ[a];
            if a == usize::MAX {
                return Err(malformed("element without cycle successor"));
            }
        }
        if a != classes[i][0] {
            return Err(malformed("cycle gadgets do not form a p-cycle"));
        }
    }
    for &(a, b) in &i_pairs {
        let (src, dst) = if label[a] != u32::MAX { (a, b) } else { (b, a) };
        if label[src] == u32::MAX || label[dst] != u32::MAX {
            return Err(malformed("inverse gadgets are inconsistent"));
        }
        label[dst] = field.neg(label[src]);
    }
    for a in (0..n).filter(|&a| is_elem(a)) {
        if label[a] == u32::MAX || label[succ[a]] != field.add(label[a], 1) {
            return Err(malformed("cycle and inverse gadgets disagree"));
        }
    }
    let mut load = vec![u32::MAX; og.n()];
    let mut per_vertex = vec![0usize; og.n()];
    for t in &r_triples {
        let v = vertex_of[class_of[t[0]]];
        let sum = t.iter().fold(0, |acc, &a| field.add(acc, label[a]));
        if load[v] != u32::MAX && load[v] != sum {
            return Err(malformed(format!("R-gadgets at vertex {v} disagree on the load")));
        }
        load[v] = sum;
        per_vertex[v] += 1;
    }
    if per_vertex.iter().any(|&c| c != p * p) {
        return Err(malformed("wrong number of R-gadgets at a vertex"));
    }
    CfiStructure::build(og, p as u64, &load)
}
