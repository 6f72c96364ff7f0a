//! Simple undirected graphs, the edge-list text format, all-pairs hop
//! distances and the resolving predicates shared by every solver.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::vertex_set::VertexSet;

pub type Vertex = usize;

/// Simple undirected graph on vertices `0..n` with sorted adjacency lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<Vertex>>,
    m: usize,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph { adj: vec![Vec::new(); n], m: 0 }
    }

    /// Builds a graph from an edge list. Duplicate edges collapse; self-loops
    /// and out-of-range endpoints are rejected.
    pub fn from_edges(n: usize, edges: &[(Vertex, Vertex)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::VertexOutOfRange { vertex: x, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop { line: 0, vertex: u });
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut m = 0;
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
            m += list.len();
        }
        Ok(Graph { adj, m: m / 2 })
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges with `u < v`, sorted lexicographically.
    pub fn edges(&self) -> Vec<(Vertex, Vertex)> {
        let mut out = Vec::with_capacity(self.m);
        for (u, list) in self.adj.iter().enumerate() {
            out.extend(list.iter().filter(|&&v| u < v).map(|&v| (u, v)));
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        if self.n() == 0 {
            return true;
        }
        let mut seen = vec![false; self.n()];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &self.adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.n()
    }

    /// Subgraph induced by `vertices` (relabelled in the given order).
    pub fn induced(&self, vertices: &[Vertex]) -> Graph {
        let mut index = HashMap::with_capacity(vertices.len());
        for (i, &v) in vertices.iter().enumerate() {
            index.insert(v, i);
        }
        let mut adj = vec![Vec::new(); vertices.len()];
        let mut m = 0;
        for (i, &v) in vertices.iter().enumerate() {
            for w in &self.adj[v] {
                if let Some(&j) = index.get(w) {
                    adj[i].push(j);
                    m += 1;
                }
            }
            adj[i].sort_unstable();
        }
        Graph { adj, m: m / 2 }
    }

    /// Edge-list text, one `u v` line per edge with `u < v`. A header
    /// `n <count>` is emitted so isolated vertices survive the round trip.
    pub fn to_edge_list(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "n {}", self.n());
        for (u, v) in self.edges() {
            let _ = writeln!(s, "{u} {v}");
        }
        s
    }
}

fn parse_id(tok: &str, line: usize) -> Result<usize> {
    tok.parse::<usize>().map_err(|_| Error::Parse { line, msg: format!("malformed vertex id {tok:?}") })
}

/// Parses the edge-list format: `u v` per line, `#` comments, an optional
/// `n <count>` header line.
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut header: Option<usize> = None;
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = trimmed.split_whitespace().collect();
        if toks[0] == "n" {
            if toks.len() != 2 || header.is_some() {
                return Err(Error::Parse { line, msg: "malformed header, expected `n <count>`".into() });
            }
            header = Some(parse_id(toks[1], line)?);
            continue;
        }
        if toks.len() != 2 {
            return Err(Error::Parse { line, msg: format!("expected two vertex ids, found {} tokens", toks.len()) });
        }
        let u = parse_id(toks[0], line)?;
        let v = parse_id(toks[1], line)?;
        if u == v {
            return Err(Error::SelfLoop { line, vertex: u });
        }
        edges.push((u, v));
    }
    let seen = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
    let n = match header {
        Some(h) if h < seen => {
            return Err(Error::Parse { line: 0, msg: format!("header declares {h} vertices but id {} appears", seen - 1) })
        }
        Some(h) => h,
        None => seen,
    };
    if n == 0 {
        return Err(Error::Parse { line: 0, msg: "graph has no vertices".into() });
    }
    Graph::from_edges(n, &edges)
}

/// Like [`parse_edge_list`] but accepts arbitrary whitespace-free labels,
/// mapping them to dense ids in order of first appearance. Returns the
/// label of every id.
pub fn parse_labeled_edge_list(text: &str) -> Result<(Graph, Vec<String>)> {
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut labels = Vec::new();
    let mut edges = Vec::new();
    let mut intern = |tok: &str, labels: &mut Vec<String>| -> usize {
        *index.entry(tok.to_string()).or_insert_with(|| {
            labels.push(tok.to_string());
            labels.len() - 1
        })
    };
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = trimmed.split_whitespace().collect();
        match toks.as_slice() {
            [single] => {
                intern(single, &mut labels);
            }
            [a, b] => {
                if a == b {
                    let v = intern(a, &mut labels);
                    return Err(Error::SelfLoop { line, vertex: v });
                }
                let u = intern(a, &mut labels);
                let v = intern(b, &mut labels);
                edges.push((u, v));
            }
            _ => {
                return Err(Error::Parse { line, msg: format!("expected one or two labels, found {}", toks.len()) })
            }
        }
    }
    if labels.is_empty() {
        return Err(Error::Parse { line: 0, msg: "graph has no vertices".into() });
    }
    Ok((Graph::from_edges(labels.len(), &edges)?, labels))
}

/// All-pairs hop counts. Unreachable pairs hold the sentinel `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceMatrix {
    n: usize,
    dist: Vec<u32>,
}

impl DistanceMatrix {
    #[inline]
    pub fn get(&self, u: Vertex, v: Vertex) -> u32 {
        self.dist[u * self.n + v]
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn unreachable(&self) -> u32 {
        self.n as u32
    }

    pub fn is_finite(&self, u: Vertex, v: Vertex) -> bool {
        self.get(u, v) < self.unreachable()
    }

    pub fn row(&self, u: Vertex) -> &[u32] {
        &self.dist[u * self.n..(u + 1) * self.n]
    }

    /// `min` over `set` of `dist(v, x)`; sentinel for an empty set.
    pub fn to_set(&self, v: Vertex, set: impl IntoIterator<Item = Vertex>) -> u32 {
        set.into_iter().map(|x| self.get(v, x)).min().unwrap_or(self.unreachable())
    }

    /// Largest pairwise distance within `set` (0 for sets of size < 2).
    pub fn diameter_of(&self, set: &[Vertex]) -> u32 {
        let mut best = 0;
        for (i, &a) in set.iter().enumerate() {
            for &b in &set[i + 1..] {
                best = best.max(self.get(a, b));
            }
        }
        best
    }
}

fn bfs_row(g: &Graph, src: Vertex) -> Vec<u32> {
    let n = g.n();
    let mut row = vec![n as u32; n];
    let mut queue = VecDeque::new();
    row[src] = 0;
    queue.push_back(src);
    while let Some(v) = queue.pop_front() {
        let d = row[v] + 1;
        for &w in g.neighbors(v) {
            if row[w] == n as u32 {
                row[w] = d;
                queue.push_back(w);
            }
        }
    }
    row
}

/// One BFS per source vertex. Sources run in parallel above a small size.
pub fn all_pairs_distances(g: &Graph) -> DistanceMatrix {
    let n = g.n();
    let rows: Vec<Vec<u32>> = if n >= 256 {
        (0..n).into_par_iter().map(|s| bfs_row(g, s)).collect()
    } else {
        (0..n).map(|s| bfs_row(g, s)).collect()
    };
    DistanceMatrix { n, dist: rows.concat() }
}

/// True iff `v` has different distances to `x` and `y`.
pub fn resolves(d: &DistanceMatrix, v: Vertex, x: Vertex, y: Vertex) -> bool {
    assert_ne!(x, y, "resolves() needs two distinct vertices");
    d.get(v, x) != d.get(v, y)
}

/// First pair `(x, y)` with `x < y` in lexicographic order that no member of
/// `w` resolves.
pub fn first_unresolved_pair(d: &DistanceMatrix, w: &[Vertex]) -> Option<(Vertex, Vertex)> {
    let n = d.n();
    // Vertices with identical distance vectors to `w` are exactly the unresolved pairs.
    let mut classes: HashMap<Vec<u32>, Vertex> = HashMap::with_capacity(n);
    let mut best: Option<(Vertex, Vertex)> = None;
    for y in 0..n {
        let key: Vec<u32> = w.iter().map(|&v| d.get(v, y)).collect();
        if let Some(&x) = classes.get(&key) {
            if best.is_none_or(|b| (x, y) < b) {
                best = Some((x, y));
            }
        } else {
            classes.insert(key, y);
        }
    }
    best
}

/// True iff every pair of distinct vertices is resolved by some member of `w`.
pub fn is_resolving_set(g: &Graph, d: &DistanceMatrix, w: &VertexSet) -> Result<bool> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    Ok(first_unresolved_pair(d, &w.to_vec()).is_none())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GraphStats {
    pub n: usize,
    pub m: usize,
    pub max_degree: usize,
    /// Sentinel `n` when disconnected.
    pub diameter: u32,
    pub connected: bool,
}

pub fn graph_stats(g: &Graph) -> GraphStats {
    let d = all_pairs_distances(g);
    let connected = g.is_connected();
    let diameter = if connected {
        (0..g.n()).flat_map(|u| d.row(u).iter().copied()).max().unwrap_or(0)
    } else {
        g.n() as u32
    };
    GraphStats { n: g.n(), m: g.m(), max_degree: g.max_degree(), diameter, connected }
}
