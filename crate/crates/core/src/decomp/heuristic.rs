//! Tree decompositions from a min-fill elimination ordering.

use std::collections::{BTreeSet, HashSet};

use crate::decomp::td::{contract_nested_bags, TreeDecomposition};
use crate::graph::{Graph, Vertex};

/// Eliminates a vertex of minimum fill-in (ties: smallest id) until the
/// graph is empty; each bag is a vertex plus its neighbours at elimination.
pub fn min_fill_order(g: &Graph) -> Vec<(Vertex, Vec<Vertex>)> {
    let n = g.n();
    let mut adj: Vec<HashSet<Vertex>> = (0..n).map(|v| g.neighbors(v).iter().copied().collect()).collect();
    let fill_of = |adj: &[HashSet<Vertex>], v: Vertex| -> usize {
        let nb: Vec<Vertex> = adj[v].iter().copied().collect();
        let mut missing = 0;
        for (i, &a) in nb.iter().enumerate() {
            missing += nb[i + 1..].iter().filter(|&&b| !adj[a].contains(&b)).count();
        }
        missing
    };
    let mut fill: Vec<usize> = (0..n).map(|v| fill_of(&adj, v)).collect();
    let mut queue: BTreeSet<(usize, Vertex)> = (0..n).map(|v| (fill[v], v)).collect();
    let mut out = Vec::with_capacity(n);
    while let Some((_, v)) = queue.pop_first() {
        let mut nb: Vec<Vertex> = adj[v].iter().copied().collect();
        nb.sort_unstable();
        for (i, &a) in nb.iter().enumerate() {
            for &b in &nb[i + 1..] {
                if adj[a].insert(b) {
                    adj[b].insert(a);
                }
            }
        }
        for &a in &nb {
            adj[a].remove(&v);
        }
        adj[v].clear();
        // Fill changes only within distance two of the eliminated vertex.
        let mut touched: BTreeSet<Vertex> = nb.iter().copied().collect();
        for &a in &nb {
            touched.extend(adj[a].iter().copied());
        }
        for x in touched {
            if queue.remove(&(fill[x], x)) {
                fill[x] = fill_of(&adj, x);
                queue.insert((fill[x], x));
            }
        }
        out.push((v, nb));
    }
    out
}

pub fn heuristic_td(g: &Graph) -> TreeDecomposition {
    let n = g.n();
    let order = min_fill_order(g);
    let mut pos = vec![0; n];
    for (i, (v, _)) in order.iter().enumerate() {
        pos[*v] = i;
    }
    let mut bags = Vec::with_capacity(n);
    let mut edges = Vec::new();
    let mut roots = Vec::new();
    for (i, (v, nb)) in order.iter().enumerate() {
        match nb.iter().map(|&w| pos[w]).min() {
            Some(p) => edges.push((i, p)),
            None => roots.push(i),
        }
        let mut bag = nb.clone();
        bag.push(*v);
        bags.push(bag);
    }
    // Components of a disconnected input hang off one another.
    for w in roots.windows(2) {
        edges.push((w[0], w[1]));
    }
    contract_nested_bags(&TreeDecomposition::new(n, bags, edges))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::chordal::clique_tree;
    use crate::decomp::td::validate_td;
    use crate::generators::{gen, Family};

    #[test]
    fn chordal_graphs_keep_their_cliques() {
        for seed in 0..40 {
            let g = gen(Family::RandomChordal, 14, seed).unwrap();
            let td = heuristic_td(&g);
            let r = validate_td(&g, &td).unwrap();
            assert!(r.valid && r.length <= 1);
            let mut a = td.bags.clone();
            let mut b = clique_tree(&g).unwrap().bags;
            a.sort();
            b.sort();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn cycle_is_valid() {
        let c6 = gen(Family::Cycle, 6, 0).unwrap();
        let r = validate_td(&c6, &heuristic_td(&c6)).unwrap();
        assert!(r.valid);
        assert_eq!(r.width, 2);
        assert!(r.length >= 2);
    }

    #[test]
    fn trees_give_edge_bags() {
        for seed in 0..20 {
            let t = gen(Family::RandomTree, 15, seed).unwrap();
            let td = heuristic_td(&t);
            let r = validate_td(&t, &td).unwrap();
            assert!(r.valid && r.length == 1 && r.width == 1);
            assert_eq!(td.bags.len(), 14);
        }
    }

    #[test]
    fn random_graphs_are_valid() {
        for seed in 0..40 {
            for fam in [Family::RandomBoundedDegree, Family::RandomCograph] {
                let g = gen(fam, 16, seed).unwrap();
                assert!(validate_td(&g, &heuristic_td(&g)).unwrap().valid);
            }
        }
        let g = Graph::from_edges(5, &[(0, 1), (2, 3)]).unwrap();
        assert!(validate_td(&g, &heuristic_td(&g)).unwrap().valid);
    }
}
