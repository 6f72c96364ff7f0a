//! Nice tree decompositions: leaf / introduce / forget / join nodes with a
//! singleton root bag.

use crate::decomp::td::{contract_nested_bags, validate_td_with, TreeDecomposition};
use crate::error::{Error, Result};
use crate::graph::{all_pairs_distances, DistanceMatrix, Graph, Vertex};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NiceKind {
    Leaf,
    Introduce(Vertex),
    Forget(Vertex),
    Join,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NiceNode {
    pub kind: NiceKind,
    /// Sorted.
    pub bag: Vec<Vertex>,
    pub children: Vec<usize>,
}

/// Nodes are stored children-first: every child index is smaller than its
/// parent's, and the root is the last node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NiceTreeDecomposition {
    pub n: usize,
    pub nodes: Vec<NiceNode>,
    pub root: usize,
}

impl NiceTreeDecomposition {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root_vertex(&self) -> Vertex {
        self.nodes[self.root].bag[0]
    }

    pub fn width(&self) -> usize {
        self.nodes.iter().map(|x| x.bag.len()).max().unwrap_or(0).saturating_sub(1)
    }

    pub fn parents(&self) -> Vec<Option<usize>> {
        let mut p = vec![None; self.nodes.len()];
        for (i, node) in self.nodes.iter().enumerate() {
            for &c in &node.children {
                p[c] = Some(i);
            }
        }
        p
    }

    /// Plain decomposition over the same bags and tree.
    pub fn to_td(&self) -> TreeDecomposition {
        let bags = self.nodes.iter().map(|x| x.bag.clone()).collect();
        let mut edges = Vec::new();
        for (i, node) in self.nodes.iter().enumerate() {
            edges.extend(node.children.iter().map(|&c| (c, i)));
        }
        TreeDecomposition::new(self.n, bags, edges)
    }

    /// Number of edges between two nodes of the tree.
    pub fn tree_distances_from(&self, src: usize) -> Vec<usize> {
        let parents = self.parents();
        let mut dist = vec![usize::MAX; self.nodes.len()];
        dist[src] = 0;
        let mut stack = vec![src];
        while let Some(i) = stack.pop() {
            let next = self.nodes[i].children.iter().copied().chain(parents[i]);
            for j in next {
                if dist[j] == usize::MAX {
                    dist[j] = dist[i] + 1;
                    stack.push(j);
                }
            }
        }
        dist
    }

    /// Structural check of the node kinds on top of plain validity.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        self.validate_with(g, &all_pairs_distances(g))
    }

    pub fn validate_with(&self, g: &Graph, d: &DistanceMatrix) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidDecomposition(msg));
        if self.nodes.is_empty() || self.root != self.nodes.len() - 1 {
            return bad("root must be the last node".into());
        }
        let report = validate_td_with(g, d, &self.to_td())?;
        if let Some(r) = report.reason {
            return bad(r);
        }
        for (i, node) in self.nodes.iter().enumerate() {
            if node.children.iter().any(|&c| c >= i) {
                return bad(format!("node {i} has a child stored after it"));
            }
            if !node.bag.windows(2).all(|w| w[0] < w[1]) {
                return bad(format!("bag of node {i} is not sorted"));
            }
            let child = |k: usize| &self.nodes[node.children[k]].bag;
            let ok = match (node.kind, node.children.len()) {
                (NiceKind::Leaf, 0) => node.bag.len() == 1,
                (NiceKind::Introduce(v), 1) => {
                    let mut expect = child(0).clone();
                    expect.push(v);
                    expect.sort_unstable();
                    !child(0).contains(&v) && expect == node.bag
                }
                (NiceKind::Forget(v), 1) => {
                    let mut expect = node.bag.clone();
                    expect.push(v);
                    expect.sort_unstable();
                    !node.bag.contains(&v) && expect == *child(0)
                }
                (NiceKind::Join, 2) => *child(0) == node.bag && *child(1) == node.bag,
                _ => false,
            };
            if !ok {
                return bad(format!("node {i} does not match its kind {:?}", node.kind));
            }
        }
        if self.nodes[self.root].bag.len() != 1 {
            return bad("root bag is not a singleton".into());
        }
        // Each join child subtree must contain a forget node.
        let mut has_forget = vec![false; self.nodes.len()];
        for (i, node) in self.nodes.iter().enumerate() {
            has_forget[i] =
                matches!(node.kind, NiceKind::Forget(_)) || node.children.iter().any(|&c| has_forget[c]);
            if node.kind == NiceKind::Join && !node.children.iter().all(|&c| has_forget[c]) {
                return bad(format!("join node {i} has a child subtree without a forget node"));
            }
        }
        Ok(())
    }
}

/// Converts a valid decomposition to a nice one rooted at `{root_vertex}`,
/// keeping width and length.
pub fn make_nice(g: &Graph, td: &TreeDecomposition, root_vertex: Vertex) -> Result<NiceTreeDecomposition> {
    let n = g.n();
    if root_vertex >= n {
        return Err(Error::VertexOutOfRange { vertex: root_vertex, n });
    }
    let d = all_pairs_distances(g);
    if let Some(r) = validate_td_with(g, &d, td)?.reason {
        return Err(Error::InvalidDecomposition(r));
    }
    let td = contract_nested_bags(td);
    let adj = td.adjacency();
    let root_bag = td.bags.iter().position(|b| b.contains(&root_vertex)).expect("bags cover V(G)");

    // Post-order over the contracted tree.
    let k = td.bags.len();
    let mut parent = vec![usize::MAX; k];
    let mut order = Vec::with_capacity(k);
    let mut stack = vec![root_bag];
    parent[root_bag] = root_bag;
    while let Some(t) = stack.pop() {
        order.push(t);
        for &c in &adj[t] {
            if parent[c] == usize::MAX {
                parent[c] = t;
                stack.push(c);
            }
        }
    }
    let mut b = Builder { nodes: Vec::new() };
    let mut top = vec![usize::MAX; k];
    for &t in order.iter().rev() {
        let bag = &td.bags[t];
        let kids: Vec<usize> = adj[t].iter().copied().filter(|&c| parent[c] == t && c != t).collect();
        top[t] = if kids.is_empty() {
            let mut cur = b.push(NiceKind::Leaf, vec![bag[0]], vec![]);
            for &v in &bag[1..] {
                cur = b.introduce(cur, v);
            }
            cur
        } else {
            let branches: Vec<usize> = kids
                .iter()
                .map(|&c| {
                    let mut cur = top[c];
                    for &v in td.bags[c].iter().filter(|v| !bag.contains(v)) {
                        cur = b.forget(cur, v);
                    }
                    for &v in bag.iter().filter(|v| !td.bags[c].contains(v)) {
                        cur = b.introduce(cur, v);
                    }
                    cur
                })
                .collect();
            let mut acc = branches[0];
            for &br in &branches[1..] {
                acc = b.push(NiceKind::Join, bag.clone(), vec![acc, br]);
            }
            acc
        };
    }
    let mut cur = top[root_bag];
    for &v in td.bags[root_bag].iter().filter(|&&v| v != root_vertex) {
        cur = b.forget(cur, v);
    }
    let nice = NiceTreeDecomposition { n, root: cur, nodes: b.nodes };
    debug_assert!(nice.validate_with(g, &d).is_ok());
    Ok(nice)
}

struct Builder {
    nodes: Vec<NiceNode>,
}

impl Builder {
    fn push(&mut self, kind: NiceKind, bag: Vec<Vertex>, children: Vec<usize>) -> usize {
        self.nodes.push(NiceNode { kind, bag, children });
        self.nodes.len() - 1
    }

    fn introduce(&mut self, child: usize, v: Vertex) -> usize {
        let mut bag = self.nodes[child].bag.clone();
        let pos = bag.binary_search(&v).expect_err("introduced vertex already present");
        bag.insert(pos, v);
        self.push(NiceKind::Introduce(v), bag, vec![child])
    }

    fn forget(&mut self, child: usize, v: Vertex) -> usize {
        let mut bag = self.nodes[child].bag.clone();
        bag.retain(|&x| x != v);
        self.push(NiceKind::Forget(v), bag, vec![child])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::td::validate_td;
    use crate::generators::{gen, Family};

    fn check(g: &Graph, td: &TreeDecomposition, r: Vertex) -> NiceTreeDecomposition {
        let before = validate_td(g, td).unwrap();
        let nice = make_nice(g, td, r).unwrap();
        nice.validate(g).unwrap();
        let after = validate_td(g, &nice.to_td()).unwrap();
        assert!(after.valid);
        assert_eq!((after.width, after.length), (before.width, before.length));
        assert_eq!(nice.nodes[nice.root].bag, vec![r]);
        nice
    }

    #[test]
    fn single_vertex() {
        let g = Graph::empty(1);
        let td = TreeDecomposition::new(1, vec![vec![0]], vec![]);
        let nice = check(&g, &td, 0);
        assert_eq!(nice.len(), 1);
        assert_eq!(nice.nodes[0].kind, NiceKind::Leaf);
    }

    #[test]
    fn path_and_cycle() {
        let p3 = gen(Family::Path, 3, 0).unwrap();
        let td = TreeDecomposition::new(3, vec![vec![0, 1], vec![1, 2]], vec![(0, 1)]);
        for r in 0..3 {
            check(&p3, &td, r);
        }
        let c5 = gen(Family::Cycle, 5, 0).unwrap();
        let td = TreeDecomposition::new(5, vec![vec![0, 1, 4], vec![1, 3, 4], vec![1, 2, 3]], vec![(0, 1), (1, 2)]);
        for r in 0..5 {
            check(&c5, &td, r);
        }
    }

    #[test]
    fn star_gets_joins() {
        let star = gen(Family::Star, 5, 0).unwrap();
        let td = TreeDecomposition::new(
            5,
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![0, 4]],
            vec![(0, 1), (0, 2), (0, 3)],
        );
        let joins = |r| check(&star, &td, r).nodes.iter().filter(|x| x.kind == NiceKind::Join).count();
        assert_eq!(joins(0), 2);
        assert_eq!(joins(2), 1);
    }

    #[test]
    fn rejects_invalid_input() {
        let p3 = gen(Family::Path, 3, 0).unwrap();
        let broken = TreeDecomposition::new(3, vec![vec![0, 1], vec![2]], vec![(0, 1)]);
        assert!(matches!(make_nice(&p3, &broken, 0), Err(Error::InvalidDecomposition(_))));
        let td = TreeDecomposition::new(3, vec![vec![0, 1], vec![1, 2]], vec![(0, 1)]);
        assert!(matches!(make_nice(&p3, &td, 7), Err(Error::VertexOutOfRange { .. })));
    }

    #[test]
    fn validator_catches_bad_kinds() {
        let p3 = gen(Family::Path, 3, 0).unwrap();
        let td = TreeDecomposition::new(3, vec![vec![0, 1], vec![1, 2]], vec![(0, 1)]);
        let mut nice = make_nice(&p3, &td, 0).unwrap();
        let i = nice.nodes.iter().position(|x| matches!(x.kind, NiceKind::Introduce(_))).unwrap();
        nice.nodes[i].kind = NiceKind::Forget(0);
        assert!(nice.validate(&p3).is_err());
    }
}
