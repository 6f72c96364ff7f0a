//! Ground-truth solvers: exhaustive subset search and the closed form for trees.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{all_pairs_distances, first_unresolved_pair, DistanceMatrix, Graph, Vertex};
use crate::vertex_set::VertexSet;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricBasis {
    pub md: usize,
    pub witness: VertexSet,
}

/// Smallest resolving set by ascending cardinality, lexicographic within a
/// cardinality. A single vertex graph reports `md = 1` with witness `{0}`.
///
/// With `budget = Some(k)` the search stops after size `k` and reports
/// [`Error::ExceedsBudget`] instead of a number.
pub fn metric_dimension_bruteforce(g: &Graph, d: &DistanceMatrix, budget: Option<usize>) -> Result<MetricBasis> {
    let n = g.n();
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    if n == 1 {
        return Ok(MetricBasis { md: 1, witness: VertexSet::from_slice(1, &[0]) });
    }
    let limit = budget.unwrap_or(n).min(n);
    let pairs: Vec<(u32, u32)> =
        (0..n).flat_map(|x| (x + 1..n).map(move |y| (x as u32, y as u32))).collect();
    for k in 1..=limit {
        // Workers split on the first element; `find_map_first` keeps the
        // lexicographically least hit regardless of scheduling.
        let hit = (0..=n - k).into_par_iter().find_map_first(|first| {
            let rest = filter_pairs(d, &pairs, first);
            let mut chosen = vec![first];
            extend(d, n, k - 1, first + 1, &rest, &mut chosen).then_some(chosen)
        });
        if let Some(w) = hit {
            return Ok(MetricBasis { md: k, witness: VertexSet::from_slice(n, &w) });
        }
    }
    Err(Error::ExceedsBudget { budget: limit })
}

fn filter_pairs(d: &DistanceMatrix, pairs: &[(u32, u32)], v: Vertex) -> Vec<(u32, u32)> {
    let row = d.row(v);
    pairs.iter().copied().filter(|&(x, y)| row[x as usize] == row[y as usize]).collect()
}

fn extend(
    d: &DistanceMatrix,
    n: usize,
    remaining: usize,
    start: usize,
    pairs: &[(u32, u32)],
    chosen: &mut Vec<Vertex>,
) -> bool {
    if remaining == 0 {
        return pairs.is_empty();
    }
    if pairs.is_empty() {
        // A smaller set already resolves; pad with the least unused ids.
        chosen.extend(start..start + remaining);
        return true;
    }
    for v in start..=n - remaining {
        let rest = filter_pairs(d, pairs, v);
        chosen.push(v);
        if extend(d, n, remaining - 1, v + 1, &rest, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// Metric dimension of a tree: 1 for paths, otherwise the number of leaves
/// minus the number of exterior major vertices (degree >= 3 with a leg, a path
/// to a leaf through degree-2 vertices only).
pub fn tree_metric_dimension(g: &Graph) -> Result<usize> {
    let n = g.n();
    if n < 2 || g.m() != n - 1 || !g.is_connected() {
        return Err(Error::NotATree);
    }
    if g.max_degree() <= 2 {
        return Ok(1);
    }
    let mut exterior = vec![false; n];
    let mut leaves = 0;
    for leaf in (0..n).filter(|&v| g.degree(v) == 1) {
        leaves += 1;
        let (mut prev, mut cur) = (leaf, g.neighbors(leaf)[0]);
        while g.degree(cur) == 2 {
            let next = g.neighbors(cur).iter().copied().find(|&w| w != prev).expect("degree 2");
            prev = cur;
            cur = next;
        }
        exterior[cur] = true;
    }
    Ok(leaves - exterior.iter().filter(|&&e| e).count())
}

/// True iff `witness` resolves `g` and has exactly `claimed_md` members.
pub fn verify_witness(g: &Graph, claimed_md: usize, witness: &VertexSet) -> bool {
    if witness.len() != claimed_md || !g.is_connected() || witness.iter().any(|v| v >= g.n()) {
        return false;
    }
    let d = all_pairs_distances(g);
    first_unresolved_pair(&d, &witness.to_vec()).is_none()
}

/// `Δ(G) <= 2^md + md - 1`. Often quoted, but false in general: some
/// 8-vertex graphs have `Δ = 6` and `md = 2`. Use [`neighbour_bound_holds`]
/// where soundness matters.
pub fn degree_bound_holds(max_degree: usize, md: usize) -> bool {
    if md >= 63 {
        return true;
    }
    (max_degree as u128) < (1u128 << md) + md as u128
}

/// `Δ(G) <= 3^md - 1`: the neighbours of a vertex have pairwise distinct
/// distance vectors, each coordinate within one of the vertex's own.
pub fn neighbour_bound_holds(max_degree: usize, md: usize) -> bool {
    if md >= 40 {
        return true;
    }
    (max_degree as u128) < 3u128.pow(md as u32)
}
