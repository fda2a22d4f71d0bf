use std::fmt;

use crate::error::{parse_err, Error, Result};
use crate::gf::text::{parse_usize, LineReader};

/// A plain undirected graph on vertices `0..n`, edges stored as sorted `(u, v)` pairs with `u < v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl SimpleGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut out = Vec::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({u}, {v}) out of range for {n} vertices"
                )));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at {u}")));
            }
            out.push((u.min(v), u.max(v)));
        }
        out.sort_unstable();
        if let Some(w) = out.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidGraph(format!(
                "duplicate edge ({}, {})",
                w[0].0, w[0].1
            )));
        }
        Ok(SimpleGraph { n, edges: out })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj.iter_mut().for_each(|a| a.sort_unstable());
        adj
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.n
    }

    /// Renames vertex `v` to `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<SimpleGraph> {
        check_permutation(perm, self.n)?;
        SimpleGraph::new(self.n, self.edges.iter().map(|&(u, v)| (perm[u], perm[v])))
    }

    /// Path on `n` vertices.
    pub fn path(n: usize) -> SimpleGraph {
        SimpleGraph::new(n, (1..n).map(|i| (i - 1, i))).expect("valid path")
    }

    /// Cycle on `n >= 3` vertices.
    pub fn cycle(n: usize) -> SimpleGraph {
        SimpleGraph::new(n, (0..n).map(|i| (i, (i + 1) % n))).expect("valid cycle")
    }

    /// Complete graph on `n` vertices.
    pub fn complete(n: usize) -> SimpleGraph {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        SimpleGraph::new(n, edges).expect("valid complete graph")
    }

    fn write_block(&self, f: &mut fmt::Formatter<'_>, header: &str) -> fmt::Result {
        writeln!(f, "{header} {} {}", self.n, self.edges.len())?;
        for &(u, v) in &self.edges {
            writeln!(f, "{u} {v}")?;
        }
        Ok(())
    }
}

pub(crate) fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::InvalidPermutation(format!(
            "length {} for {n} points",
            perm.len()
        )));
    }
    let mut seen = vec![false; n];
    for &x in perm {
        if x >= n || std::mem::replace(&mut seen[x], true) {
            return Err(Error::InvalidPermutation(format!("{x} repeated or out of range")));
        }
    }
    Ok(())
}

impl fmt::Display for SimpleGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_block(f, "graph")
    }
}

/// Connected 3-regular graph whose vertex order is numeric order.
///
/// Directed edges are the pairs `(u, v)` for every undirected edge, sorted by
/// `(source, target)`; `E(v)` lists the directed edges with source `v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderedGraph {
    graph: SimpleGraph,
    directed: Vec<(usize, usize)>,
    dual: Vec<usize>,
    out_edges: Vec<[usize; 3]>,
}

impl OrderedGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        Self::from_simple(SimpleGraph::new(n, edges)?)
    }

    pub fn from_simple(graph: SimpleGraph) -> Result<Self> {
        if let Some((vertex, &degree)) = graph.degrees().iter().enumerate().find(|(_, &d)| d != 3) {
            return Err(Error::NotThreeRegular { vertex, degree });
        }
        if !graph.is_connected() {
            return Err(Error::Disconnected);
        }
        let mut directed: Vec<(usize, usize)> = graph
            .edges
            .iter()
            .flat_map(|&(u, v)| [(u, v), (v, u)])
            .collect();
        directed.sort_unstable();
        let dual = directed
            .iter()
            .map(|&(u, v)| directed.binary_search(&(v, u)).expect("dual present"))
            .collect();
        let out_edges = (0..graph.n)
            .map(|v| {
                let start = directed.partition_point(|&(s, _)| s < v);
                [start, start + 1, start + 2]
            })
            .collect();
        Ok(OrderedGraph {
            graph,
            directed,
            dual,
            out_edges,
        })
    }

    /// Looks up a graph from the built-in catalog (case-insensitive).
    pub fn catalog(name: &str) -> Result<Self> {
        let edges: Vec<(usize, usize)> = match name.to_ascii_lowercase().as_str() {
            "k4" => return Self::from_simple(SimpleGraph::complete(4)),
            "k33" | "k3,3" => (0..3).flat_map(|u| (3..6).map(move |v| (u, v))).collect(),
            "prism" => vec![(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (0, 3), (1, 4), (2, 5)],
            "cube" | "q3" => (0..8usize)
                .flat_map(|u| [1, 2, 4].into_iter().map(move |b| (u, u ^ b)))
                .filter(|&(u, v)| u < v)
                .collect(),
            "petersen" => (0..5)
                .flat_map(|i| [(i, (i + 1) % 5), (i, i + 5), (5 + i, 5 + (i + 2) % 5)])
                .collect(),
            _ => {
                return Err(Error::InvalidGraph(format!(
                    "unknown catalog graph `{name}` (known: {})",
                    CATALOG.join(", ")
                )))
            }
        };
        let n = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
        Self::new(n, edges)
    }

    pub fn n(&self) -> usize {
        self.graph.n
    }

    pub fn simple(&self) -> &SimpleGraph {
        &self.graph
    }

    pub fn undirected_edges(&self) -> &[(usize, usize)] {
        &self.graph.edges
    }

    pub fn undirected_count(&self) -> usize {
        self.graph.edges.len()
    }

    pub fn directed_edges(&self) -> &[(usize, usize)] {
        &self.directed
    }

    pub fn directed_count(&self) -> usize {
        self.directed.len()
    }

    /// Index of `e^{-1}`.
    pub fn dual(&self, e: usize) -> usize {
        self.dual[e]
    }

    /// `E(v)` in increasing edge order.
    pub fn out_edges(&self, v: usize) -> [usize; 3] {
        self.out_edges[v]
    }

    pub fn source(&self, e: usize) -> usize {
        self.directed[e].0
    }

    /// Index of the directed edge `(u, v)`.
    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        self.directed.binary_search(&(u, v)).ok()
    }
}

/// Names accepted by [`OrderedGraph::catalog`].
pub const CATALOG: [&str; 5] = ["K4", "K33", "prism", "cube", "petersen"];

impl fmt::Display for OrderedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.graph.write_block(f, "ordered-graph")
    }
}

pub(crate) fn read_graph_block(
    reader: &mut LineReader<'_>,
    keyword: &str,
) -> Result<SimpleGraph> {
    let (ln, header) = reader.expect_line(keyword)?;
    let mut toks = header.split_whitespace();
    if toks.next() != Some(keyword) {
        return Err(parse_err(ln, format!("expected `{keyword} <n> <m>`")));
    }
    let n = parse_usize(ln, toks.next(), "vertex count")?;
    let m = parse_usize(ln, toks.next(), "edge count")?;
    if toks.next().is_some() {
        return Err(parse_err(ln, "trailing tokens"));
    }
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let (ln, line) = reader.expect_line("edge line")?;
        let mut toks = line.split_whitespace();
        let u = parse_usize(ln, toks.next(), "endpoint")?;
        let v = parse_usize(ln, toks.next(), "endpoint")?;
        if toks.next().is_some() {
            return Err(parse_err(ln, "trailing tokens"));
        }
        if u >= v || v >= n {
            return Err(parse_err(ln, format!("edge must satisfy 0 <= u < v < {n}")));
        }
        edges.push((u, v));
    }
    SimpleGraph::new(n, edges).map_err(|e| parse_err(reader.line_number(), e.to_string()))
}

fn finish(reader: &mut LineReader<'_>) -> Result<()> {
    match reader.next_line() {
        Some((ln, _)) => Err(parse_err(ln, "trailing content")),
        None => Ok(()),
    }
}

impl std::str::FromStr for SimpleGraph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut reader = LineReader::new(s);
        let g = read_graph_block(&mut reader, "graph")?;
        finish(&mut reader)?;
        Ok(g)
    }
}

impl std::str::FromStr for OrderedGraph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut reader = LineReader::new(s);
        let g = read_graph_block(&mut reader, "ordered-graph")?;
        finish(&mut reader)?;
        OrderedGraph::from_simple(g)
    }
}
