//! Empirical checks of the structural facts the tree-length tables rely on.

use serde::Serialize;

use crate::decomp::{NiceKind, NiceTreeDecomposition};
use crate::error::Result;
use crate::graph::{all_pairs_distances, DistanceMatrix, Graph, Vertex};
use crate::tl::bounds::{alpha, locality_radius};
use crate::tl::layout::Layout;

#[derive(Clone, Debug, Default, Serialize)]
pub struct LemmaCounts {
    /// Vertices whose bag subtree was measured.
    pub bag_runs: usize,
    /// Node pairs compared against the distance bound.
    pub node_pairs: usize,
    /// `(introduce node, far vertex)` pairs.
    pub introduce_far: usize,
    /// `(x, y)` pairs across join nodes.
    pub join_pairs: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct LemmaReport {
    pub alpha: u64,
    pub s: usize,
    pub checked: LemmaCounts,
    pub violations: Vec<String>,
}

impl LemmaReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks with the closed-form `alpha` and `s` for this graph and
/// decomposition. Fails if `nice` is not a valid nice decomposition.
pub fn check_structural_lemmas(g: &Graph, nice: &NiceTreeDecomposition) -> Result<LemmaReport> {
    let d = all_pairs_distances(g);
    nice.validate_with(g, &d)?;
    let ell = nice.nodes.iter().map(|x| d.diameter_of(&x.bag) as u64).max().unwrap_or(0).max(1);
    let delta = g.max_degree().max(1) as u64;
    let a = alpha(delta, ell)?;
    let s = usize::try_from(locality_radius(delta, ell)?).unwrap_or(usize::MAX);
    Ok(check_with(&d, nice, a, s))
}

/// Same checks with explicit parameters.
pub fn check_structural_lemmas_with(g: &Graph, nice: &NiceTreeDecomposition, a: u64, s: usize) -> Result<LemmaReport> {
    let d = all_pairs_distances(g);
    nice.validate_with(g, &d)?;
    Ok(check_with(&d, nice, a, s.max(1)))
}

const MAX_REPORTED: usize = 20;

fn check_with(d: &DistanceMatrix, nice: &NiceTreeDecomposition, a: u64, s: usize) -> LemmaReport {
    let mut rep = LemmaReport { alpha: a, s, checked: LemmaCounts::default(), violations: Vec::new() };
    let flag = |rep: &mut LemmaReport, msg: String| {
        if rep.violations.len() < MAX_REPORTED {
            rep.violations.push(msg);
        }
    };
    let n = nice.n;
    let count = nice.len();
    let u = nice.root_vertex();

    // Longest tree path of bags sharing one vertex.
    for z in 0..n {
        let mut down = vec![0u64; count];
        let mut longest = 0u64;
        for (i, node) in nice.nodes.iter().enumerate() {
            if node.bag.binary_search(&z).is_err() {
                continue;
            }
            let mut top = [0u64; 2];
            for &c in &node.children {
                let h = down[c];
                if h > top[0] {
                    top = [h, top[0]];
                } else if h > top[1] {
                    top[1] = h;
                }
            }
            down[i] = 1 + top[0];
            longest = longest.max(1 + top[0] + top[1]);
        }
        rep.checked.bag_runs += 1;
        if longest > a {
            flag(&mut rep, format!("vertex {z} lies in a path of {longest} bags (bound {a})"));
        }
    }

    // Tree distance against graph distance between bags.
    for i in 0..count {
        let dist = nice.tree_distances_from(i);
        for j in i + 1..count {
            let close = min_distance(d, &nice.nodes[i].bag, &nice.nodes[j].bag) as u64;
            rep.checked.node_pairs += 1;
            let bound = a.saturating_mul(close + 1) - 1;
            if dist[j] as u64 > bound {
                flag(&mut rep, format!("nodes {i} and {j} are {} apart in the tree (bound {bound})", dist[j]));
            }
        }
    }

    let layout = Layout::new(nice, s);
    for (i, node) in nice.nodes.iter().enumerate() {
        match node.kind {
            NiceKind::Introduce(v) => {
                for x in deep_vertices(nice, i, s) {
                    rep.checked.introduce_far += 1;
                    if d.get(u, v) == d.get(u, x) {
                        flag(&mut rep, format!("introduce node {i}: u={u} does not resolve {v} and far vertex {x}"));
                    }
                }
            }
            NiceKind::Join => {
                for (p, q) in [(0, 1), (1, 0)] {
                    let (c1, c2) = (node.children[p], node.children[q]);
                    for j in nodes_at_depth(nice, c1, s - 1) {
                        let inner: Vec<Vertex> = layout.below[j].iter().collect();
                        for &x in &inner {
                            for y in layout.below[c2].iter() {
                                rep.checked.join_pairs += 1;
                                if d.get(u, x) != d.get(u, y) {
                                    continue;
                                }
                                if let Some(&w) = inner.iter().find(|&&w| d.get(w, x) == d.get(w, y)) {
                                    flag(&mut rep, format!("join node {i}: neither u={u} nor {w} resolves {x} and {y}"));
                                }
                            }
                        }
                    }
                }
            }
            _ => {}
        }
    }
    rep
}

fn min_distance(d: &DistanceMatrix, a: &[Vertex], b: &[Vertex]) -> u32 {
    a.iter().flat_map(|&x| b.iter().map(move |&y| d.get(x, y))).min().unwrap_or(0)
}

fn nodes_at_depth(nice: &NiceTreeDecomposition, i: usize, depth: usize) -> Vec<usize> {
    let mut level = vec![i];
    for _ in 0..depth {
        level = level.iter().flat_map(|&j| nice.nodes[j].children.iter().copied()).collect();
    }
    level
}

/// Vertices in bags at tree depth `>= s` below `i`.
fn deep_vertices(nice: &NiceTreeDecomposition, i: usize, s: usize) -> Vec<Vertex> {
    let mut seen = vec![false; nice.n];
    let mut stack = vec![(i, 0usize)];
    while let Some((j, depth)) = stack.pop() {
        if depth >= s {
            for &v in &nice.nodes[j].bag {
                seen[v] = true;
            }
        }
        stack.extend(nice.nodes[j].children.iter().map(|&c| (c, depth + 1)));
    }
    (0..nice.n).filter(|&v| seen[v]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::{make_nice, NiceNode, TreeDecomposition};
    use crate::generators::{gen, Family};

    fn path_td(n: usize) -> TreeDecomposition {
        TreeDecomposition::new(n, (0..n - 1).map(|i| vec![i, i + 1]).collect(), (0..n - 2).map(|i| (i, i + 1)).collect())
    }

    #[test]
    fn long_path_is_non_vacuous() {
        let n = 90;
        let g = gen(Family::Path, n, 0).unwrap();
        let nice = make_nice(&g, &path_td(n), n / 2).unwrap();
        let rep = check_structural_lemmas(&g, &nice).unwrap();
        assert_eq!(rep.s, 72);
        assert!(rep.ok(), "{:?}", rep.violations);
        assert!(rep.checked.introduce_far > 0);
        assert!(rep.checked.join_pairs > 0);
    }

    #[test]
    fn tiny_alpha_is_caught() {
        let g = gen(Family::Path, 12, 0).unwrap();
        let nice = make_nice(&g, &path_td(12), 0).unwrap();
        let rep = check_structural_lemmas_with(&g, &nice, 1, 2).unwrap();
        assert!(!rep.ok());
    }

    #[test]
    fn broken_decomposition_is_rejected() {
        let g = gen(Family::Path, 4, 0).unwrap();
        let mut nice = make_nice(&g, &path_td(4), 0).unwrap();
        nice.nodes.insert(0, NiceNode { kind: NiceKind::Leaf, bag: vec![3], children: vec![] });
        assert!(check_structural_lemmas(&g, &nice).is_err());
    }
}
