//! Per-node neighbourhoods of a rooted nice decomposition at tree depth `s`.

use crate::decomp::NiceTreeDecomposition;
use crate::vertex_set::VertexSet;

/// For node `i`: `y` is the union of the bags at depth `<= s` below `i`
/// (counting `i` itself as depth 0), `far` lists the nodes at depth exactly
/// `s` and `near` those at depth `s - 1`. `sub` is `V(G_i)` and `below` is
/// `V(G_i) \ X_i`.
#[derive(Clone, Debug)]
pub struct Layout {
    pub s: usize,
    pub y: Vec<VertexSet>,
    pub far: Vec<Vec<usize>>,
    pub near: Vec<Vec<usize>>,
    pub sub: Vec<VertexSet>,
    pub below: Vec<VertexSet>,
}

impl Layout {
    /// `s` must be at least 1.
    pub fn new(nice: &NiceTreeDecomposition, s: usize) -> Self {
        assert!(s >= 1, "layout radius must be positive");
        let n = nice.n;
        let count = nice.len();
        let mut sub: Vec<VertexSet> = Vec::with_capacity(count);
        for node in &nice.nodes {
            let mut set = VertexSet::from_slice(n, &node.bag);
            for &c in &node.children {
                set.union_with(&sub[c]);
            }
            sub.push(set);
        }
        let below = nice
            .nodes
            .iter()
            .zip(&sub)
            .map(|(node, set)| {
                let mut b = set.clone();
                for &v in &node.bag {
                    b.remove(v);
                }
                b
            })
            .collect();

        let mut y = Vec::with_capacity(count);
        let mut far = Vec::with_capacity(count);
        let mut near = Vec::with_capacity(count);
        for i in 0..count {
            let mut yi = VertexSet::new(n);
            let (mut fi, mut ni) = (Vec::new(), Vec::new());
            let mut stack = vec![(i, 0usize)];
            while let Some((j, depth)) = stack.pop() {
                for &v in &nice.nodes[j].bag {
                    yi.insert(v);
                }
                if depth == s {
                    fi.push(j);
                    continue;
                }
                if depth + 1 == s {
                    ni.push(j);
                }
                stack.extend(nice.nodes[j].children.iter().map(|&c| (c, depth + 1)));
            }
            fi.sort_unstable();
            ni.sort_unstable();
            y.push(yi);
            far.push(fi);
            near.push(ni);
        }
        Layout { s, y, far, near, sub, below }
    }
}
