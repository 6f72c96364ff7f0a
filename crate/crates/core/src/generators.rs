//! Seeded constructors for the graph families used in tests and benchmarks.

use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Path,
    Cycle,
    Complete,
    Star,
    RandomTree,
    RandomCograph,
    RandomChordal,
    RandomBoundedDegree,
    Petersen,
}

impl Family {
    pub const ALL: [Family; 9] = [
        Family::Path,
        Family::Cycle,
        Family::Complete,
        Family::Star,
        Family::RandomTree,
        Family::RandomCograph,
        Family::RandomChordal,
        Family::RandomBoundedDegree,
        Family::Petersen,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Path => "path",
            Family::Cycle => "cycle",
            Family::Complete => "complete",
            Family::Star => "star",
            Family::RandomTree => "random_tree",
            Family::RandomCograph => "random_cograph",
            Family::RandomChordal => "random_chordal",
            Family::RandomBoundedDegree => "random_bounded_degree",
            Family::Petersen => "petersen",
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.replace('-', "_");
        Family::ALL
            .into_iter()
            .find(|f| f.name() == norm)
            .ok_or_else(|| Error::Contract(format!("unknown graph family {s:?}")))
    }
}

/// Degree cap used by [`Family::RandomBoundedDegree`].
pub const DEFAULT_DEGREE_CAP: usize = 3;
/// Largest clique a new vertex attaches to in [`Family::RandomChordal`].
pub const CHORDAL_ATTACH_CAP: usize = 3;
const CONNECT_ATTEMPTS: usize = 200;

pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Builds a member of `family` on `n` vertices. Deterministic in `(family, n, seed)`.
pub fn gen(family: Family, n: usize, seed: u64) -> Result<Graph> {
    let bad = |why: &str| Err(Error::Contract(format!("{}: {why}", family.name())));
    if n == 0 {
        return bad("n must be at least 1");
    }
    let mut rng = rng_for(seed);
    match family {
        Family::Path => Graph::from_edges(n, &(1..n).map(|v| (v - 1, v)).collect::<Vec<_>>()),
        Family::Cycle => {
            if n < 3 {
                return bad("n must be at least 3");
            }
            Graph::from_edges(n, &(0..n).map(|v| (v, (v + 1) % n)).collect::<Vec<_>>())
        }
        Family::Complete => {
            let mut edges = Vec::new();
            for u in 0..n {
                edges.extend((u + 1..n).map(|v| (u, v)));
            }
            Graph::from_edges(n, &edges)
        }
        Family::Star => Graph::from_edges(n, &(1..n).map(|v| (0, v)).collect::<Vec<_>>()),
        Family::Petersen => {
            if n != 10 {
                return bad("the Petersen graph has exactly 10 vertices");
            }
            let mut edges = Vec::new();
            for i in 0..5 {
                edges.push((i, (i + 1) % 5));
                edges.push((i, i + 5));
                edges.push((5 + i, 5 + (i + 2) % 5));
            }
            Graph::from_edges(10, &edges)
        }
        Family::RandomTree => Ok(random_tree(n, &mut rng)),
        Family::RandomCograph => Ok(random_cograph(n, &mut rng)),
        Family::RandomChordal => Ok(random_chordal(n, CHORDAL_ATTACH_CAP, &mut rng)),
        Family::RandomBoundedDegree => random_bounded_degree(n, DEFAULT_DEGREE_CAP, &mut rng),
    }
}

/// Vertex `v` attaches to a uniform earlier vertex.
pub fn random_tree(n: usize, rng: &mut impl Rng) -> Graph {
    let edges: Vec<_> = (1..n).map(|v| (rng.gen_range(0..v), v)).collect();
    Graph::from_edges(n, &edges).expect("tree edges are in range")
}

/// Random union/join expression over `n` leaves. The outermost operation is a
/// join, so the result is connected.
pub fn random_cograph(n: usize, rng: &mut impl Rng) -> Graph {
    let mut edges = Vec::new();
    let mut ids: Vec<Vertex> = (0..n).collect();
    ids.shuffle(rng);
    cograph_rec(&ids, true, rng, &mut edges);
    Graph::from_edges(n, &edges).expect("cograph edges are in range")
}

fn cograph_rec(ids: &[Vertex], join: bool, rng: &mut impl Rng, edges: &mut Vec<(Vertex, Vertex)>) {
    if ids.len() < 2 {
        return;
    }
    let cut = rng.gen_range(1..ids.len());
    let (left, right) = ids.split_at(cut);
    if join {
        for &a in left {
            edges.extend(right.iter().map(|&b| (a, b)));
        }
    }
    // Children use the opposite operation half the time; repeating the same
    // operation only merges with the parent node.
    let lj = if rng.gen_bool(0.5) { !join } else { join };
    let rj = if rng.gen_bool(0.5) { !join } else { join };
    cograph_rec(left, lj, rng, edges);
    cograph_rec(right, rj, rng, edges);
}

/// Each new vertex attaches to a random sub-clique (containing a chosen
/// anchor) of the clique the anchor was created with. Reversing the creation
/// order gives a perfect elimination ordering.
pub fn random_chordal(n: usize, attach_cap: usize, rng: &mut impl Rng) -> Graph {
    let mut cliques: Vec<Vec<Vertex>> = vec![vec![0]];
    let mut edges = Vec::new();
    for v in 1..n {
        let anchor = rng.gen_range(0..v);
        let mut attach = vec![anchor];
        for &w in &cliques[anchor] {
            if w != anchor && attach.len() < attach_cap && rng.gen_bool(0.5) {
                attach.push(w);
            }
        }
        edges.extend(attach.iter().map(|&w| (w, v)));
        attach.push(v);
        cliques.push(attach);
    }
    Graph::from_edges(n, &edges).expect("chordal edges are in range")
}

/// Random connected graph with maximum degree at most `cap`: candidate pairs
/// in random order, rejecting any that would exceed the cap. Retries a bounded
/// number of times until the result is connected.
pub fn random_bounded_degree(n: usize, cap: usize, rng: &mut impl Rng) -> Result<Graph> {
    if n == 1 {
        return Ok(Graph::empty(1));
    }
    if cap < 2 && n > 2 {
        return Err(Error::Contract(format!("no connected graph on {n} vertices has max degree {cap}")));
    }
    let mut pairs = Vec::new();
    for u in 0..n {
        pairs.extend((u + 1..n).map(|v| (u, v)));
    }
    for _ in 0..CONNECT_ATTEMPTS {
        pairs.shuffle(rng);
        let mut deg = vec![0; n];
        let mut comp: Vec<usize> = (0..n).collect();
        fn find(c: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while c[r] != r {
                r = c[r];
            }
            c[x] = r;
            r
        }
        let mut edges = Vec::new();
        for &(u, v) in &pairs {
            if deg[u] >= cap || deg[v] >= cap {
                continue;
            }
            let (a, b) = (find(&mut comp, u), find(&mut comp, v));
            // Bridging edges are always taken; extra cycle edges sparingly.
            if a != b || rng.gen_bool(0.25) {
                comp[a] = b;
                deg[u] += 1;
                deg[v] += 1;
                edges.push((u, v));
            }
        }
        let g = Graph::from_edges(n, &edges)?;
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(Error::Contract(format!("no connected bounded-degree graph after {CONNECT_ATTEMPTS} attempts")))
}
