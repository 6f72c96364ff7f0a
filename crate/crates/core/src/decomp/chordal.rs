//! Clique trees of chordal graphs via maximum cardinality search.

use std::collections::VecDeque;

use crate::decomp::td::{contract_nested_bags, TreeDecomposition};
use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};

/// Maximum cardinality search visit order; ties go to the smallest id.
pub fn mcs_order(g: &Graph) -> Vec<Vertex> {
    let n = g.n();
    let mut weight = vec![0usize; n];
    let mut done = vec![false; n];
    // Buckets of candidate vertices per weight; stale entries are skipped.
    let mut buckets: Vec<std::collections::BTreeSet<Vertex>> = vec![std::collections::BTreeSet::new(); n + 1];
    buckets[0].extend(0..n);
    let mut top = 0;
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        while buckets[top].is_empty() {
            top -= 1;
        }
        let v = buckets[top].pop_first().expect("non-empty bucket");
        done[v] = true;
        order.push(v);
        for &w in g.neighbors(v) {
            if !done[w] {
                buckets[weight[w]].remove(&w);
                weight[w] += 1;
                buckets[weight[w]].insert(w);
                top = top.max(weight[w]);
            }
        }
    }
    order
}

/// Clique tree of a connected chordal graph: one bag per maximal clique.
/// Non-chordal input yields [`Error::NotChordal`] with a chordless cycle.
pub fn clique_tree(g: &Graph) -> Result<TreeDecomposition> {
    let n = g.n();
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    // Reverse MCS order is a perfect elimination ordering iff g is chordal.
    let peo: Vec<Vertex> = mcs_order(g).into_iter().rev().collect();
    let mut pos = vec![0; n];
    for (i, &v) in peo.iter().enumerate() {
        pos[v] = i;
    }
    let later = |v: Vertex| -> Vec<Vertex> { g.neighbors(v).iter().copied().filter(|&w| pos[w] > pos[v]).collect() };
    let mut bags = Vec::with_capacity(n);
    let mut edges = Vec::new();
    for &v in &peo {
        let lv = later(v);
        if let Some(&p) = lv.iter().min_by_key(|&&w| pos[w]) {
            if let Some(&w) = lv.iter().find(|&&w| w != p && !g.has_edge(p, w)) {
                let cycle = chordless_cycle_at(g, v, p, w).or_else(|| find_chordless_cycle(g)).expect("non-chordal graph has a chordless cycle");
                return Err(Error::NotChordal { cycle });
            }
            edges.push((pos[v], pos[p]));
        }
        let mut bag = lv;
        bag.push(v);
        bags.push(bag);
    }
    Ok(contract_nested_bags(&TreeDecomposition::new(n, bags, edges)))
}

/// Chordless cycle through `v` whose neighbours on the cycle are the
/// non-adjacent `a` and `b`, if `a` and `b` are joined outside `N[v]`.
fn chordless_cycle_at(g: &Graph, v: Vertex, a: Vertex, b: Vertex) -> Option<Vec<Vertex>> {
    let n = g.n();
    let mut blocked = vec![false; n];
    blocked[v] = true;
    for &x in g.neighbors(v) {
        blocked[x] = x != a && x != b;
    }
    let mut prev = vec![usize::MAX; n];
    prev[a] = a;
    let mut queue = VecDeque::from([a]);
    while let Some(x) = queue.pop_front() {
        if x == b {
            break;
        }
        for &y in g.neighbors(x) {
            // `b` may only be reached as the endpoint of the path.
            if !blocked[y] && prev[y] == usize::MAX && !(x == a && y == b) {
                prev[y] = x;
                queue.push_back(y);
            }
        }
    }
    if prev[b] == usize::MAX {
        return None;
    }
    let mut cycle = vec![v];
    let mut cur = b;
    while cur != a {
        cycle.push(cur);
        cur = prev[cur];
    }
    cycle.push(a);
    Some(cycle)
}

/// Any chordless cycle of length at least 4.
pub fn find_chordless_cycle(g: &Graph) -> Option<Vec<Vertex>> {
    for v in 0..g.n() {
        let nb = g.neighbors(v);
        for (i, &a) in nb.iter().enumerate() {
            for &b in &nb[i + 1..] {
                if !g.has_edge(a, b) {
                    if let Some(c) = chordless_cycle_at(g, v, a, b) {
                        return Some(c);
                    }
                }
            }
        }
    }
    None
}
