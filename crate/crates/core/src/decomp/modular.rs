//! Modular decomposition by recursive splitting: components, co-components,
//! otherwise the maximal strong modules under a prime quotient.

use std::collections::VecDeque;
use std::fmt::Write as _;

use crate::graph::{Graph, Vertex};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModularKind {
    Leaf(Vertex),
    Union,
    Join,
    /// Quotient vertex `i` stands for child `i`.
    Prime { quotient: Graph },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModularNode {
    pub kind: ModularKind,
    /// Sorted vertex set of the module.
    pub vertices: Vec<Vertex>,
    /// Ordered by smallest member.
    pub children: Vec<usize>,
}

/// Arena-stored decomposition tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModularTree {
    pub nodes: Vec<ModularNode>,
    pub root: usize,
}

impl ModularTree {
    /// Node indices with every child before its parent.
    pub fn post_order(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![(self.root, false)];
        while let Some((i, expanded)) = stack.pop() {
            if expanded {
                out.push(i);
            } else {
                stack.push((i, true));
                stack.extend(self.nodes[i].children.iter().rev().map(|&c| (c, false)));
            }
        }
        out
    }

    /// Indented text rendering, one node per line.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let mut stack = vec![(self.root, 0)];
        while let Some((i, depth)) = stack.pop() {
            let node = &self.nodes[i];
            let pad = "  ".repeat(depth);
            let _ = match &node.kind {
                ModularKind::Leaf(v) => writeln!(s, "{pad}leaf {v}"),
                ModularKind::Union => writeln!(s, "{pad}union {:?}", node.vertices),
                ModularKind::Join => writeln!(s, "{pad}join {:?}", node.vertices),
                ModularKind::Prime { quotient } => {
                    writeln!(s, "{pad}prime {:?} quotient {:?}", node.vertices, quotient.edges())
                }
            };
            stack.extend(node.children.iter().rev().map(|&c| (c, depth + 1)));
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModularDecomposition {
    pub tree: ModularTree,
    /// Largest prime quotient; 0 when there is none.
    pub width: usize,
}

/// True iff every vertex of `within \ set` sees all or none of `set`.
pub fn is_module(g: &Graph, set: &[Vertex], within: &[Vertex]) -> bool {
    within.iter().filter(|v| !set.contains(v)).all(|&z| {
        let hits = set.iter().filter(|&&x| g.has_edge(z, x)).count();
        hits == 0 || hits == set.len()
    })
}

pub fn modular_decompose(g: &Graph) -> ModularDecomposition {
    let n = g.n();
    let mut nodes: Vec<ModularNode> = Vec::new();
    let mut width = 0;
    if n == 0 {
        return ModularDecomposition { tree: ModularTree { nodes, root: 0 }, width };
    }
    let mut ws = Workspace { mark: vec![0; n], stamp: 0 };
    // Placeholder nodes are filled as their vertex sets are split.
    nodes.push(ModularNode { kind: ModularKind::Union, vertices: (0..n).collect(), children: vec![] });
    let mut pending = vec![0];
    while let Some(i) = pending.pop() {
        let set = nodes[i].vertices.clone();
        if set.len() == 1 {
            nodes[i].kind = ModularKind::Leaf(set[0]);
            continue;
        }
        let comps = ws.components(g, &set, false);
        let (kind, parts) = if comps.len() > 1 {
            (ModularKind::Union, comps)
        } else {
            let co = ws.components(g, &set, true);
            if co.len() > 1 {
                (ModularKind::Join, co)
            } else {
                let parts = ws.prime_parts(g, &set);
                let reps: Vec<Vertex> = parts.iter().map(|p| p[0]).collect();
                let mut qe = Vec::new();
                for a in 0..reps.len() {
                    qe.extend((a + 1..reps.len()).filter(|&b| g.has_edge(reps[a], reps[b])).map(|b| (a, b)));
                }
                width = width.max(parts.len());
                (ModularKind::Prime { quotient: Graph::from_edges(reps.len(), &qe).expect("quotient edges") }, parts)
            }
        };
        nodes[i].kind = kind;
        for part in parts {
            nodes.push(ModularNode { kind: ModularKind::Union, vertices: part, children: vec![] });
            let c = nodes.len() - 1;
            nodes[i].children.push(c);
            pending.push(c);
        }
    }
    ModularDecomposition { tree: ModularTree { nodes, root: 0 }, width }
}

struct Workspace {
    mark: Vec<u32>,
    stamp: u32,
}

impl Workspace {
    fn fresh(&mut self, set: &[Vertex]) -> u32 {
        self.stamp += 1;
        for &v in set {
            self.mark[v] = self.stamp;
        }
        self.stamp
    }

    /// Connected components of `G[set]`, or of its complement. Each part is
    /// sorted and parts are ordered by smallest member.
    fn components(&mut self, g: &Graph, set: &[Vertex], complement: bool) -> Vec<Vec<Vertex>> {
        let inside = self.fresh(set);
        let mut parts = Vec::new();
        if !complement {
            let seen = inside + 1;
            self.stamp = seen;
            for &s in set {
                if self.mark[s] == seen {
                    continue;
                }
                self.mark[s] = seen;
                let mut part = vec![s];
                let mut queue = VecDeque::from([s]);
                while let Some(x) = queue.pop_front() {
                    for &y in g.neighbors(x) {
                        if self.mark[y] == inside {
                            self.mark[y] = seen;
                            part.push(y);
                            queue.push_back(y);
                        }
                    }
                }
                part.sort_unstable();
                parts.push(part);
            }
        } else {
            // Complement BFS over the shrinking list of unvisited vertices.
            let mut unvisited: Vec<Vertex> = set.to_vec();
            while let Some(s) = unvisited.first().copied() {
                unvisited.swap_remove(0);
                let mut part = vec![s];
                let mut queue = VecDeque::from([s]);
                while let Some(x) = queue.pop_front() {
                    self.stamp += 1;
                    let nbr = self.stamp;
                    for &y in g.neighbors(x) {
                        if self.mark[y] >= inside {
                            self.mark[y] = nbr;
                        }
                    }
                    let (mut keep, mut take) = (Vec::new(), Vec::new());
                    for &y in &unvisited {
                        if self.mark[y] == nbr {
                            keep.push(y);
                        } else {
                            take.push(y);
                        }
                    }
                    // Restore membership marks for the next sweep.
                    for &y in g.neighbors(x) {
                        if self.mark[y] == nbr {
                            self.mark[y] = inside;
                        }
                    }
                    for &y in &take {
                        part.push(y);
                        queue.push_back(y);
                    }
                    unvisited = keep;
                }
                part.sort_unstable();
                parts.push(part);
            }
            parts.sort();
        }
        parts
    }

    /// Maximal strong modules of `G[set]` when both it and its complement
    /// are connected. Sorted parts, ordered by smallest member.
    fn prime_parts(&mut self, g: &Graph, set: &[Vertex]) -> Vec<Vec<Vertex>> {
        let v = set[0];
        let inside = self.fresh(set);
        // Coarsest partition of set \ {v} into modules, by refinement
        // starting from the split by N(v).
        let mut part_of = vec![usize::MAX; g.n()];
        let mut parts: Vec<Vec<Vertex>> = Vec::new();
        {
            let (mut adj_v, mut non): (Vec<Vertex>, Vec<Vertex>) = (Vec::new(), Vec::new());
            for &x in &set[1..] {
                if g.has_edge(v, x) {
                    adj_v.push(x);
                } else {
                    non.push(x);
                }
            }
            for p in [adj_v, non] {
                if !p.is_empty() {
                    for &x in &p {
                        part_of[x] = parts.len();
                    }
                    parts.push(p);
                }
            }
        }
        let mut queue: VecDeque<Vertex> = set[1..].iter().copied().collect();
        let mut queued = vec![false; g.n()];
        for &x in &set[1..] {
            queued[x] = true;
        }
        let mut hit: Vec<usize> = Vec::new();
        let mut hit_count = vec![0usize; 0];
        while let Some(y) = queue.pop_front() {
            queued[y] = false;
            let py = part_of[y];
            hit.clear();
            for &z in g.neighbors(y) {
                if self.mark[z] == inside && z != v && part_of[z] != py {
                    let pz = part_of[z];
                    if hit_count.len() < parts.len() {
                        hit_count.resize(parts.len(), 0);
                    }
                    if hit_count[pz] == 0 {
                        hit.push(pz);
                    }
                    hit_count[pz] += 1;
                }
            }
            for &p in &hit {
                let cnt = std::mem::take(&mut hit_count[p]);
                if cnt == parts[p].len() {
                    continue;
                }
                let (inn, out): (Vec<Vertex>, Vec<Vertex>) = parts[p].iter().partition(|&&z| g.has_edge(y, z));
                let np = parts.len();
                for &z in &out {
                    part_of[z] = np;
                }
                parts[p] = inn;
                parts.push(out);
                for q in [p, np] {
                    for &z in &parts[q] {
                        if !queued[z] {
                            queued[z] = true;
                            queue.push_back(z);
                        }
                    }
                }
            }
        }
        // Part X forces part Y when Y sees X differently from v. The parts
        // outside the strong module of v form the unique source component.
        let k = parts.len();
        let reps: Vec<Vertex> = parts.iter().map(|p| p[0]).collect();
        let mut out_edges = vec![Vec::new(); k];
        for x in 0..k {
            for y in 0..k {
                if x != y && g.has_edge(reps[y], reps[x]) != g.has_edge(reps[y], v) {
                    out_edges[x].push(y);
                }
            }
        }
        let comp = scc(&out_edges);
        let ncomp = comp.iter().max().map_or(0, |&c| c + 1);
        let mut has_in = vec![false; ncomp];
        for x in 0..k {
            for &y in &out_edges[x] {
                if comp[x] != comp[y] {
                    has_in[comp[y]] = true;
                }
            }
        }
        let source = (0..ncomp).find(|&c| !has_in[c]).expect("a DAG has a source");
        let mut own = vec![v];
        let mut result = Vec::new();
        for (x, part) in parts.into_iter().enumerate() {
            if comp[x] == source {
                result.push(part);
            } else {
                own.extend(part);
            }
        }
        result.push(own);
        for p in &mut result {
            p.sort_unstable();
        }
        result.sort();
        result
    }
}

/// Strongly connected component id per node (Tarjan, iterative).
fn scc(adj: &[Vec<usize>]) -> Vec<usize> {
    let k = adj.len();
    let mut index = vec![usize::MAX; k];
    let mut low = vec![0; k];
    let mut on_stack = vec![false; k];
    let mut stack = Vec::new();
    let mut comp = vec![usize::MAX; k];
    let (mut next_index, mut next_comp) = (0, 0);
    for s in 0..k {
        if index[s] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(s, 0)];
        index[s] = next_index;
        low[s] = next_index;
        next_index += 1;
        stack.push(s);
        on_stack[s] = true;
        while let Some(&mut (x, ref mut it)) = call.last_mut() {
            if *it < adj[x].len() {
                let y = adj[x][*it];
                *it += 1;
                if index[y] == usize::MAX {
                    index[y] = next_index;
                    low[y] = next_index;
                    next_index += 1;
                    stack.push(y);
                    on_stack[y] = true;
                    call.push((y, 0));
                } else if on_stack[y] {
                    low[x] = low[x].min(index[y]);
                }
            } else {
                call.pop();
                if let Some(&(p, _)) = call.last() {
                    low[p] = low[p].min(low[x]);
                }
                if low[x] == index[x] {
                    loop {
                        let y = stack.pop().expect("tarjan stack");
                        on_stack[y] = false;
                        comp[y] = next_comp;
                        if y == x {
                            break;
                        }
                    }
                    next_comp += 1;
                }
            }
        }
    }
    comp
}
