//! Plain tree decompositions: validation, width/length, PACE `.td` text.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{all_pairs_distances, DistanceMatrix, Graph, Vertex};

/// Bags are sorted vertex lists; `edges` are tree edges between bag indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    pub n: usize,
    pub bags: Vec<Vec<Vertex>>,
    pub edges: Vec<(usize, usize)>,
}

impl TreeDecomposition {
    /// Sorts every bag and normalises the edge list.
    pub fn new(n: usize, mut bags: Vec<Vec<Vertex>>, edges: Vec<(usize, usize)>) -> Self {
        for b in &mut bags {
            b.sort_unstable();
            b.dedup();
        }
        let mut edges: Vec<_> = edges.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
        edges.sort_unstable();
        edges.dedup();
        TreeDecomposition { n, bags, edges }
    }

    pub fn width(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(0).saturating_sub(1)
    }

    /// Largest bag diameter measured in the host graph.
    pub fn length(&self, d: &DistanceMatrix) -> u32 {
        self.bags.iter().map(|b| d.diameter_of(b)).max().unwrap_or(0)
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.bags.len()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TdReport {
    pub valid: bool,
    pub width: usize,
    pub length: u32,
    /// First violated condition, when invalid.
    pub reason: Option<String>,
}

/// Checks the three decomposition conditions and reports width and length.
pub fn validate_td(g: &Graph, td: &TreeDecomposition) -> Result<TdReport> {
    validate_td_with(g, &all_pairs_distances(g), td)
}

pub fn validate_td_with(g: &Graph, d: &DistanceMatrix, td: &TreeDecomposition) -> Result<TdReport> {
    let n = g.n();
    for bag in &td.bags {
        if let Some(&v) = bag.iter().find(|&&v| v >= n) {
            return Err(Error::VertexOutOfRange { vertex: v, n });
        }
    }
    let report = |reason: Option<String>| TdReport {
        valid: reason.is_none(),
        width: td.width(),
        length: td.length(d),
        reason,
    };
    Ok(report(first_violation(g, td)))
}

fn first_violation(g: &Graph, td: &TreeDecomposition) -> Option<String> {
    let n = g.n();
    let k = td.bags.len();
    if k == 0 {
        return Some("no bags".into());
    }
    if let Some(&(a, b)) = td.edges.iter().find(|&&(a, b)| a >= k || b >= k || a == b) {
        return Some(format!("tree edge ({a}, {b}) is not between two distinct bags"));
    }
    if td.edges.len() != k - 1 || !connected(k, &td.adjacency(), |_| true) {
        return Some("bag graph is not a tree".into());
    }
    let mut covered = vec![false; n];
    for bag in &td.bags {
        for &v in bag {
            covered[v] = true;
        }
    }
    if let Some(v) = covered.iter().position(|&c| !c) {
        return Some(format!("vertex {v} is in no bag"));
    }
    let mut holders: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for (i, bag) in td.bags.iter().enumerate() {
        for &v in bag {
            holders[v].insert(i);
        }
    }
    for (u, v) in g.edges() {
        if holders[u].intersection(&holders[v]).next().is_none() {
            return Some(format!("edge ({u}, {v}) is in no bag"));
        }
    }
    let adj = td.adjacency();
    for (v, h) in holders.iter().enumerate() {
        if !connected(k, &adj, |i| h.contains(&i)) {
            return Some(format!("bags containing vertex {v} are not connected"));
        }
    }
    None
}

/// True iff the nodes passing `keep` induce a connected subgraph (vacuous when empty).
fn connected(k: usize, adj: &[Vec<usize>], keep: impl Fn(usize) -> bool) -> bool {
    let Some(start) = (0..k).find(|&i| keep(i)) else { return true };
    let mut seen = vec![false; k];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(i) = queue.pop_front() {
        for &j in &adj[i] {
            if !seen[j] && keep(j) {
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    (0..k).all(|i| !keep(i) || seen[i])
}

/// Repeatedly merges a bag into a tree neighbour that contains it. Keeps
/// validity, width and length; afterwards no tree edge joins nested bags.
pub fn contract_nested_bags(td: &TreeDecomposition) -> TreeDecomposition {
    let k = td.bags.len();
    let mut alive = vec![true; k];
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); k];
    for &(a, b) in &td.edges {
        adj[a].insert(b);
        adj[b].insert(a);
    }
    let subset = |a: &[Vertex], b: &[Vertex]| a.iter().all(|v| b.binary_search(v).is_ok());
    let mut changed = true;
    while changed {
        changed = false;
        for a in 0..k {
            if !alive[a] {
                continue;
            }
            let target = adj[a].iter().copied().find(|&b| subset(&td.bags[a], &td.bags[b]));
            if let Some(b) = target {
                let nbrs: Vec<usize> = adj[a].iter().copied().filter(|&c| c != b).collect();
                for c in nbrs {
                    adj[c].remove(&a);
                    adj[c].insert(b);
                    adj[b].insert(c);
                }
                adj[b].remove(&a);
                adj[a].clear();
                alive[a] = false;
                changed = true;
            }
        }
    }
    let mut index = vec![usize::MAX; k];
    let mut bags = Vec::new();
    for a in (0..k).filter(|&a| alive[a]) {
        index[a] = bags.len();
        bags.push(td.bags[a].clone());
    }
    let mut edges = Vec::new();
    for a in (0..k).filter(|&a| alive[a]) {
        edges.extend(adj[a].iter().filter(|&&b| a < b).map(|&b| (index[a], index[b])));
    }
    TreeDecomposition::new(td.n, bags, edges)
}

/// Parses PACE `.td` text. Bag ids and vertices are 1-based in the file.
pub fn parse_td(text: &str) -> Result<TreeDecomposition> {
    let perr = |line: usize, msg: String| Error::Parse { line, msg };
    let mut header: Option<(usize, usize, usize, usize)> = None;
    let mut bags: Vec<Option<Vec<Vertex>>> = Vec::new();
    let mut edges = Vec::new();
    let num = |tok: &str, line: usize| -> Result<usize> {
        tok.parse::<usize>().map_err(|_| perr(line, format!("malformed number {tok:?}")))
    };
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let toks: Vec<&str> = raw.split_whitespace().collect();
        if toks.is_empty() || toks[0] == "c" {
            continue;
        }
        match toks[0] {
            "s" => {
                if header.is_some() {
                    return Err(perr(line, "duplicate header".into()));
                }
                if toks.len() != 5 || toks[1] != "td" {
                    return Err(perr(line, "expected `s td <bags> <max-bag> <n>`".into()));
                }
                let (k, w, n) = (num(toks[2], line)?, num(toks[3], line)?, num(toks[4], line)?);
                header = Some((k, w, n, line));
                bags = vec![None; k];
            }
            "b" => {
                let Some((k, _, n, _)) = header else { return Err(perr(line, "bag before header".into())) };
                if toks.len() < 2 {
                    return Err(perr(line, "bag line without id".into()));
                }
                let id = num(toks[1], line)?;
                if id == 0 || id > k {
                    return Err(perr(line, format!("bag id {id} outside 1..={k}")));
                }
                if bags[id - 1].is_some() {
                    return Err(perr(line, format!("bag {id} defined twice")));
                }
                let mut bag = Vec::with_capacity(toks.len() - 2);
                for t in &toks[2..] {
                    let v = num(t, line)?;
                    if v == 0 || v > n {
                        return Err(perr(line, format!("vertex {v} outside 1..={n}")));
                    }
                    bag.push(v - 1);
                }
                bags[id - 1] = Some(bag);
            }
            _ => {
                let Some((k, _, _, _)) = header else { return Err(perr(line, "edge before header".into())) };
                if toks.len() != 2 {
                    return Err(perr(line, "expected a tree edge `<i> <j>`".into()));
                }
                let (a, b) = (num(toks[0], line)?, num(toks[1], line)?);
                if a == 0 || b == 0 || a > k || b > k {
                    return Err(perr(line, format!("tree edge ({a}, {b}) outside 1..={k}")));
                }
                edges.push((a - 1, b - 1));
            }
        }
    }
    let Some((_, w, n, hline)) = header else { return Err(perr(0, "missing `s td` header".into())) };
    let bags: Vec<Vec<Vertex>> = bags
        .into_iter()
        .enumerate()
        .map(|(i, b)| b.ok_or_else(|| perr(0, format!("bag {} declared but never defined", i + 1))))
        .collect::<Result<_>>()?;
    let td = TreeDecomposition::new(n, bags, edges);
    let largest = td.bags.iter().map(Vec::len).max().unwrap_or(0);
    if largest != w {
        return Err(perr(hline, format!("header declares max bag size {w}, largest bag has {largest}")));
    }
    Ok(td)
}

/// Writes canonical PACE `.td` text.
pub fn write_td(td: &TreeDecomposition) -> String {
    let mut s = String::new();
    let largest = td.bags.iter().map(Vec::len).max().unwrap_or(0);
    let _ = writeln!(s, "s td {} {} {}", td.bags.len(), largest, td.n);
    for (i, bag) in td.bags.iter().enumerate() {
        let _ = write!(s, "b {}", i + 1);
        for v in bag {
            let _ = write!(s, " {}", v + 1);
        }
        s.push('\n');
    }
    for &(a, b) in &td.edges {
        let _ = writeln!(s, "{} {}", a + 1, b + 1);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen, Family};

    fn p3_td() -> TreeDecomposition {
        TreeDecomposition::new(3, vec![vec![0, 1], vec![1, 2]], vec![(0, 1)])
    }

    #[test]
    fn validate_examples() {
        let p3 = gen(Family::Path, 3, 0).unwrap();
        let r = validate_td(&p3, &p3_td()).unwrap();
        assert_eq!((r.valid, r.width, r.length), (true, 1, 1));

        let k4 = gen(Family::Complete, 4, 0).unwrap();
        let single = TreeDecomposition::new(4, vec![vec![0, 1, 2, 3]], vec![]);
        let r = validate_td(&k4, &single).unwrap();
        assert_eq!((r.valid, r.width, r.length), (true, 3, 1));

        let broken = TreeDecomposition::new(3, vec![vec![0, 1], vec![2]], vec![(0, 1)]);
        let r = validate_td(&p3, &broken).unwrap();
        assert!(!r.valid);
        assert!(r.reason.unwrap().contains("edge (1, 2)"));
    }

    #[test]
    fn validate_rejects_each_condition() {
        let p4 = gen(Family::Path, 4, 0).unwrap();
        let uncovered = TreeDecomposition::new(4, vec![vec![0, 1], vec![1, 2]], vec![(0, 1)]);
        assert!(!validate_td(&p4, &uncovered).unwrap().valid);
        let split = TreeDecomposition::new(
            4,
            vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![1]],
            vec![(0, 1), (1, 2), (2, 3)],
        );
        let r = validate_td(&p4, &split).unwrap();
        assert!(r.reason.unwrap().contains("vertex 1"));
        let cyclic = TreeDecomposition::new(
            4,
            vec![vec![0, 1], vec![1, 2], vec![2, 3]],
            vec![(0, 1), (1, 2), (0, 2)],
        );
        assert!(!validate_td(&p4, &cyclic).unwrap().valid);
        let out = TreeDecomposition::new(4, vec![vec![0, 9]], vec![]);
        assert_eq!(validate_td(&p4, &out), Err(Error::VertexOutOfRange { vertex: 9, n: 4 }));
    }

    #[test]
    fn length_of_cycle_path_decomposition() {
        let c5 = gen(Family::Cycle, 5, 0).unwrap();
        let td = TreeDecomposition::new(5, vec![vec![0, 1, 4], vec![1, 3, 4], vec![1, 2, 3]], vec![(0, 1), (1, 2)]);
        let r = validate_td(&c5, &td).unwrap();
        assert_eq!((r.valid, r.width, r.length), (true, 2, 2));
    }

    #[test]
    fn contraction_removes_nested_bags() {
        let p3 = gen(Family::Path, 3, 0).unwrap();
        let td = TreeDecomposition::new(
            3,
            vec![vec![0], vec![0, 1], vec![1], vec![1, 2], vec![2]],
            vec![(0, 1), (1, 2), (2, 3), (3, 4)],
        );
        assert!(validate_td(&p3, &td).unwrap().valid);
        let c = contract_nested_bags(&td);
        assert_eq!(c.bags, vec![vec![0, 1], vec![1, 2]]);
        assert_eq!(c.edges, vec![(0, 1)]);
    }

    #[test]
    fn parse_examples() {
        let td = parse_td("s td 1 4 4\nb 1 1 2 3 4\n").unwrap();
        assert_eq!(td, TreeDecomposition::new(4, vec![vec![0, 1, 2, 3]], vec![]));
        assert!(validate_td(&gen(Family::Complete, 4, 0).unwrap(), &td).unwrap().valid);

        let e = parse_td("s td 1 2 4\nb 1 1 9\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }), "{e:?}");
        assert!(matches!(parse_td("s td 2 2 3\nb 1 1 2\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse_td("s td 1 3 3\nb 1 1 2\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_td("b 1 1\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_td("s td 2 2 3\nb 1 1 2\nb 2 2 3\n1 3\n"), Err(Error::Parse { line: 4, .. })));
    }

    #[test]
    fn round_trip() {
        let td = TreeDecomposition::new(
            5,
            vec![vec![0, 1, 4], vec![1, 3, 4], vec![1, 2, 3]],
            vec![(1, 0), (2, 1)],
        );
        let text = write_td(&td);
        assert_eq!(text, "s td 3 3 5\nb 1 1 2 5\nb 2 2 4 5\nb 3 2 3 4\n1 2\n2 3\n");
        assert_eq!(parse_td(&text).unwrap(), td);
        let with_comment = format!("c generated\n{text}");
        assert_eq!(parse_td(&with_comment).unwrap(), td);
    }
}
