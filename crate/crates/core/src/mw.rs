//! Exact metric dimension by dynamic programming over a modular
//! decomposition.
//!
//! For a module `H` with at least two vertices, `w(H, p, q)` is the least
//! size of `W ⊆ V(H)` that resolves `V(H)` once a universal vertex is added,
//! where `p` (resp. `q`) records whether some vertex of `H` is at distance
//! exactly 1 (resp. 2) from every vertex of `W`.

use serde::Serialize;

use crate::decomp::{ModularKind, ModularTree};
use crate::error::{Error, Result};
use crate::graph::{all_pairs_distances, Graph, Vertex};
use crate::vertex_set::VertexSet;

/// Widest prime quotient the enumeration accepts.
pub const MAX_PRIME_WIDTH: usize = 24;

/// `values[p][q]`; `None` is infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MwEntry {
    pub values: [[Option<usize>; 2]; 2],
}

impl MwEntry {
    pub fn get(&self, p: bool, q: bool) -> Option<usize> {
        self.values[p as usize][q as usize]
    }
}

/// How a module is assembled from its parts.
#[derive(Clone, Copy, Debug)]
pub enum ModuleOp<'a> {
    Union,
    Join,
    /// Quotient vertex `i` stands for part `i`.
    Prime { quotient: &'a Graph },
}

/// A part is a single vertex or a module with an already computed table.
#[derive(Clone, Copy, Debug)]
pub enum Part {
    Single,
    Module(MwEntry),
}

#[derive(Clone, Debug)]
pub struct MwResult {
    pub md: usize,
    pub witness: VertexSet,
    /// Largest prime quotient met; 0 for cographs.
    pub width_used: usize,
}

type Pq = (bool, bool);

#[derive(Clone, Debug)]
enum Choice {
    /// No back-pointer (tables built from bare values).
    Opaque,
    Singles { take: [bool; 2] },
    OneSingle { single: usize, take: bool, sub: Pq },
    Pair { sub: [Pq; 2] },
    Prime { take: Vec<usize>, sub: Vec<(usize, Pq)> },
}

#[derive(Clone, Debug)]
struct Cell {
    val: usize,
    choice: Choice,
}

type Table = [[Option<Cell>; 2]; 2];

const PQ: [Pq; 4] = [(false, false), (false, true), (true, false), (true, true)];

fn empty_table() -> Table {
    Default::default()
}

fn to_entry(t: &Table) -> MwEntry {
    let mut values = [[None; 2]; 2];
    for (p, q) in PQ {
        values[p as usize][q as usize] = t[p as usize][q as usize].as_ref().map(|c| c.val);
    }
    MwEntry { values }
}

fn from_entry(e: &MwEntry) -> Table {
    let mut t = empty_table();
    for (p, q) in PQ {
        t[p as usize][q as usize] = e.get(p, q).map(|val| Cell { val, choice: Choice::Opaque });
    }
    t
}

fn val(t: &Table, (p, q): Pq) -> Option<usize> {
    t[p as usize][q as usize].as_ref().map(|c| c.val)
}

/// Keeps the first strictly smallest candidate.
fn offer(slot: &mut Option<Cell>, val: Option<usize>, choice: impl FnOnce() -> Choice) {
    if let Some(v) = val {
        if slot.as_ref().is_none_or(|c| v < c.val) {
            *slot = Some(Cell { val: v, choice: choice() });
        }
    }
}

#[derive(Clone, Copy)]
enum PartRef<'a> {
    Single,
    Module(&'a Table),
}

/// Union (`join == false`) or join of two parts.
fn binary(join: bool, a: PartRef, b: PartRef) -> Table {
    let mut t = empty_table();
    match (a, b) {
        (PartRef::Single, PartRef::Single) => {
            // Two vertices at distance 2 (union) or 1 (join).
            let one = if join { (true, false) } else { (false, true) };
            t[one.0 as usize][one.1 as usize] = Some(Cell { val: 1, choice: Choice::Singles { take: [true, false] } });
            t[0][0] = Some(Cell { val: 2, choice: Choice::Singles { take: [true, true] } });
        }
        (PartRef::Single, PartRef::Module(m)) | (PartRef::Module(m), PartRef::Single) => {
            let single = if matches!(a, PartRef::Single) { 0 } else { 1 };
            let pick = |take: bool, sub: Pq| move || Choice::OneSingle { single, take, sub };
            let plus = |x: Option<usize>| x.map(|v| v + 1);
            // Everything is phrased for the union; the join swaps p and q.
            let sw = |(p, q): Pq| if join { (q, p) } else { (p, q) };
            let cands: [(Pq, Vec<(Option<usize>, bool, Pq)>); 2] = [
                ((true, true), vec![(val(m, sw((true, false))), false, sw((true, false)))]),
                (
                    (false, true),
                    vec![
                        (val(m, sw((false, false))), false, sw((false, false))),
                        (plus(val(m, sw((true, true)))), true, sw((true, true))),
                        (plus(val(m, sw((false, true)))), true, sw((false, true))),
                    ],
                ),
            ];
            for (pq, list) in cands {
                let (p, q) = sw(pq);
                for (v, take, sub) in list {
                    offer(&mut t[p as usize][q as usize], v, pick(take, sub));
                }
            }
            let ff = &mut t[0][0];
            for sub in [sw((true, false)), sw((false, false))] {
                offer(ff, plus(val(m, sub)), pick(true, sub));
            }
        }
        (PartRef::Module(m1), PartRef::Module(m2)) => {
            for s1 in PQ {
                for s2 in PQ {
                    let (Some(v1), Some(v2)) = (val(m1, s1), val(m2, s2)) else { continue };
                    let (x1, x2) = if join { (s1.0, s2.0) } else { (s1.1, s2.1) };
                    let target = if x1 != x2 {
                        if join { (true, false) } else { (false, true) }
                    } else if !x1 {
                        (false, false)
                    } else {
                        continue;
                    };
                    offer(&mut t[target.0 as usize][target.1 as usize], Some(v1 + v2), || Choice::Pair { sub: [s1, s2] });
                }
            }
        }
    }
    t
}

/// Which distances between a nontrivial part and an outside vertex are
/// already told apart by the part itself.
#[derive(Clone, Copy)]
enum Frame {
    /// Inside a module: distances `{1, 2}`, output `(p, q)` matters.
    Inner,
    /// The whole graph: true quotient distances, only the minimum matters.
    Root,
}

/// Enumerates the solution's trace on the trivial parts and the `(p, q)`
/// summaries of the nontrivial parts of a prime node.
fn prime(frame: Frame, dist: &[Vec<u32>], parts: &[PartRef]) -> Table {
    let s = parts.len();
    let trivial: Vec<usize> = (0..s).filter(|&i| matches!(parts[i], PartRef::Single)).collect();
    let nontrivial: Vec<usize> = (0..s).filter(|&i| !matches!(parts[i], PartRef::Single)).collect();
    let tables: Vec<Option<&Table>> = parts
        .iter()
        .map(|p| match p {
            PartRef::Module(t) => Some(*t),
            PartRef::Single => None,
        })
        .collect();
    let (p_ok, q_ok): (fn(u32) -> bool, fn(u32) -> bool) = match frame {
        Frame::Inner => (|d| d == 2, |d| d == 1),
        Frame::Root => (|d| d >= 2, |d| d != 2),
    };
    let n_mask: u64 = nontrivial.iter().fold(0, |m, &i| m | 1 << i);

    let mut best = empty_table();
    let h = trivial.len();
    let mut subsets: Vec<u64> = (0..1u64 << h).collect();
    subsets.sort_by_key(|m| (m.count_ones(), *m));
    for sel in subsets {
        let i_mask = trivial.iter().enumerate().filter(|(k, _)| sel >> k & 1 == 1).fold(0u64, |m, (_, &i)| m | 1 << i);
        let z = i_mask | n_mask;
        let outside: Vec<usize> = trivial.iter().copied().filter(|&j| z >> j & 1 == 0).collect();
        // sep[i] bit j: some r in Z other than i, j tells v_i and v_j apart.
        let sep: Vec<u64> = (0..s)
            .map(|i| {
                (0..s).fold(0u64, |m, j| {
                    let hit = (0..s).any(|r| r != i && r != j && z >> r & 1 == 1 && dist[r][i] != dist[r][j]);
                    if hit { m | 1 << j } else { m }
                })
            })
            .collect();
        // a) Z resolves the quotient.
        if outside.iter().enumerate().any(|(k, &i)| outside[k + 1..].iter().any(|&j| sep[i] >> j & 1 == 0)) {
            continue;
        }
        let ok_with = |i: usize, pred: fn(u32) -> bool| outside.iter().all(|&j| pred(dist[i][j]) || sep[i] >> j & 1 == 1);
        let clash = |i: usize, pred: fn(u32) -> bool| {
            nontrivial.iter().fold(0u64, |m, &j| if j != i && !pred(dist[i][j]) && sep[i] >> j & 1 == 0 { m | 1 << j } else { m })
        };
        let p_allowed: Vec<bool> = (0..s).map(|i| ok_with(i, p_ok)).collect();
        let q_allowed: Vec<bool> = (0..s).map(|i| ok_with(i, q_ok)).collect();
        let p_clash: Vec<u64> = (0..s).map(|i| clash(i, p_ok)).collect();
        let q_clash: Vec<u64> = (0..s).map(|i| clash(i, q_ok)).collect();
        let all_at = |i: usize, d: u32| (0..s).all(|r| r == i || z >> r & 1 == 0 || dist[i][r] == d);
        let p_free = outside.iter().any(|&j| all_at(j, 1));
        let q_free = outside.iter().any(|&j| all_at(j, 2));
        let one: u64 = nontrivial.iter().filter(|&&i| all_at(i, 1)).fold(0, |m, &i| m | 1 << i);
        let two: u64 = nontrivial.iter().filter(|&&i| all_at(i, 2)).fold(0, |m, &i| m | 1 << i);

        let base = sel.count_ones() as usize;
        let take: Vec<usize> = trivial.iter().copied().filter(|&j| z >> j & 1 == 1).collect();
        let mut pick: Vec<Pq> = Vec::with_capacity(nontrivial.len());
        let mut st = Search {
            nontrivial: &nontrivial,
            tables: &tables,
            p_allowed: &p_allowed,
            q_allowed: &q_allowed,
            p_clash: &p_clash,
            q_clash: &q_clash,
            best: &mut best,
            frame,
            finish: Finish { p_free, q_free, one, two, base, take: &take },
        };
        st.go(0, 0, 0, 0, &mut pick);
    }
    best
}

struct Finish<'a> {
    p_free: bool,
    q_free: bool,
    one: u64,
    two: u64,
    base: usize,
    take: &'a [usize],
}

struct Search<'a> {
    nontrivial: &'a [usize],
    tables: &'a [Option<&'a Table>],
    p_allowed: &'a [bool],
    q_allowed: &'a [bool],
    p_clash: &'a [u64],
    q_clash: &'a [u64],
    best: &'a mut Table,
    frame: Frame,
    finish: Finish<'a>,
}

impl Search<'_> {
    fn go(&mut self, k: usize, pm: u64, qm: u64, cost: usize, pick: &mut Vec<Pq>) {
        if k == self.nontrivial.len() {
            let f = &self.finish;
            let (p, q) = match self.frame {
                Frame::Inner => (f.p_free || pm & f.one != 0, f.q_free || qm & f.two != 0),
                Frame::Root => (false, false),
            };
            let total = cost + f.base;
            let slot = &mut self.best[p as usize][q as usize];
            offer(slot, Some(total), || Choice::Prime {
                take: f.take.to_vec(),
                sub: self.nontrivial.iter().copied().zip(pick.iter().copied()).collect(),
            });
            return;
        }
        let i = self.nontrivial[k];
        let table = self.tables[i].expect("nontrivial part has a table");
        for pq in PQ {
            let Some(v) = val(table, pq) else { continue };
            if pq.0 && (!self.p_allowed[i] || self.p_clash[i] & pm != 0) {
                continue;
            }
            if pq.1 && (!self.q_allowed[i] || self.q_clash[i] & qm != 0) {
                continue;
            }
            pick.push(pq);
            let (pm2, qm2) = (if pq.0 { pm | 1 << i } else { pm }, if pq.1 { qm | 1 << i } else { qm });
            self.go(k + 1, pm2, qm2, cost + v, pick);
            pick.pop();
        }
    }
}

fn quotient_distances(quotient: &Graph, inner: bool) -> Vec<Vec<u32>> {
    let d = all_pairs_distances(quotient);
    let s = quotient.n();
    (0..s).map(|i| (0..s).map(|j| if inner && i != j { d.get(i, j).min(2) } else { d.get(i, j) }).collect()).collect()
}

fn check_width(s: usize) -> Result<()> {
    if s > MAX_PRIME_WIDTH {
        return Err(Error::Contract(format!("prime node with {s} parts exceeds the supported width {MAX_PRIME_WIDTH}")));
    }
    Ok(())
}

fn combine(op: ModuleOp, parts: &[PartRef]) -> Result<Table> {
    match op {
        ModuleOp::Union | ModuleOp::Join => {
            if parts.len() < 2 {
                return Err(Error::Contract("union and join need at least two parts".into()));
            }
            let join = matches!(op, ModuleOp::Join);
            let mut acc = binary(join, parts[0], parts[1]);
            for &p in &parts[2..] {
                acc = binary(join, PartRef::Module(&acc), p);
            }
            Ok(acc)
        }
        ModuleOp::Prime { quotient } => {
            if quotient.n() != parts.len() || parts.len() < 2 {
                return Err(Error::Contract(format!("{} parts for a quotient on {} vertices", parts.len(), quotient.n())));
            }
            check_width(parts.len())?;
            Ok(prime(Frame::Inner, &quotient_distances(quotient, true), parts))
        }
    }
}

/// `w(H, ·, ·)` of a module assembled by `op` from `parts`.
pub fn mw_table(op: ModuleOp, parts: &[Part]) -> Result<MwEntry> {
    let tables: Vec<Option<Table>> = parts
        .iter()
        .map(|p| match p {
            Part::Single => None,
            Part::Module(e) => Some(from_entry(e)),
        })
        .collect();
    let refs: Vec<PartRef> = tables.iter().map(|t| t.as_ref().map_or(PartRef::Single, PartRef::Module)).collect();
    Ok(to_entry(&combine(op, &refs)?))
}

/// Binary expression over the modular tree; long unions and joins are
/// folded from the left.
enum Expr {
    Vertex(Vertex),
    Bin { join: bool, a: usize, b: usize },
    Prime { parts: Vec<usize>, quotient: Graph },
}

struct Plan {
    exprs: Vec<Expr>,
    /// Expression index of each modular tree node.
    of_node: Vec<usize>,
    width: usize,
}

fn plan(tree: &ModularTree) -> Plan {
    let mut exprs = Vec::new();
    let mut of_node = vec![usize::MAX; tree.nodes.len()];
    let mut width = 0;
    for i in tree.post_order() {
        let node = &tree.nodes[i];
        let kids: Vec<usize> = node.children.iter().map(|&c| of_node[c]).collect();
        of_node[i] = match &node.kind {
            ModularKind::Leaf(v) => {
                exprs.push(Expr::Vertex(*v));
                exprs.len() - 1
            }
            ModularKind::Union | ModularKind::Join => {
                let join = matches!(node.kind, ModularKind::Join);
                let mut acc = kids[0];
                for &k in &kids[1..] {
                    exprs.push(Expr::Bin { join, a: acc, b: k });
                    acc = exprs.len() - 1;
                }
                acc
            }
            ModularKind::Prime { quotient } => {
                width = width.max(quotient.n());
                exprs.push(Expr::Prime { parts: kids, quotient: quotient.clone() });
                exprs.len() - 1
            }
        };
    }
    Plan { exprs, of_node, width }
}

fn part_ref<'a>(exprs: &[Expr], tables: &'a [Option<Table>], e: usize) -> PartRef<'a> {
    match exprs[e] {
        Expr::Vertex(_) => PartRef::Single,
        _ => PartRef::Module(tables[e].as_ref().expect("child table computed")),
    }
}

/// Tables of every non-leaf expression, children first.
fn evaluate(plan: &Plan, upto: usize) -> Result<Vec<Option<Table>>> {
    let mut tables: Vec<Option<Table>> = Vec::with_capacity(plan.exprs.len());
    for (e, ex) in plan.exprs.iter().enumerate() {
        let t = if e >= upto {
            None
        } else {
            match ex {
                Expr::Vertex(_) => None,
                Expr::Bin { join, a, b } => Some(binary(*join, part_ref(&plan.exprs, &tables, *a), part_ref(&plan.exprs, &tables, *b))),
                Expr::Prime { parts, quotient } => {
                    check_width(parts.len())?;
                    let refs: Vec<PartRef> = parts.iter().map(|&p| part_ref(&plan.exprs, &tables, p)).collect();
                    Some(prime(Frame::Inner, &quotient_distances(quotient, true), &refs))
                }
            }
        };
        tables.push(t);
    }
    Ok(tables)
}

/// Root computation; returns the value and the choice that realises it.
fn root_value(plan: &Plan, tables: &[Option<Table>], root: usize) -> Result<Cell> {
    let exprs = &plan.exprs;
    match &exprs[root] {
        Expr::Vertex(_) => Ok(Cell { val: 1, choice: Choice::Singles { take: [true, false] } }),
        Expr::Bin { join: false, .. } => Err(Error::Disconnected),
        Expr::Bin { join: true, a, b } => {
            let (pa, pb) = (part_ref(exprs, tables, *a), part_ref(exprs, tables, *b));
            let mut best: Option<Cell> = None;
            match (pa, pb) {
                (PartRef::Single, PartRef::Single) => {
                    best = Some(Cell { val: 1, choice: Choice::Singles { take: [true, false] } });
                }
                (PartRef::Single, PartRef::Module(m)) | (PartRef::Module(m), PartRef::Single) => {
                    let single = if matches!(pa, PartRef::Single) { 0 } else { 1 };
                    let cands = [
                        ((false, true), false),
                        ((false, false), false),
                        ((true, true), true),
                        ((true, false), true),
                    ];
                    for (sub, take) in cands {
                        offer(&mut best, val(m, sub).map(|v| v + take as usize), || Choice::OneSingle { single, take, sub });
                    }
                }
                (PartRef::Module(m1), PartRef::Module(m2)) => {
                    for s1 in PQ {
                        for s2 in PQ {
                            if s1.0 && s2.0 {
                                continue;
                            }
                            if let (Some(v1), Some(v2)) = (val(m1, s1), val(m2, s2)) {
                                offer(&mut best, Some(v1 + v2), || Choice::Pair { sub: [s1, s2] });
                            }
                        }
                    }
                }
            }
            best.ok_or_else(|| Error::Contract("no admissible root combination".into()))
        }
        Expr::Prime { parts, quotient } => {
            check_width(parts.len())?;
            let refs: Vec<PartRef> = parts.iter().map(|&p| part_ref(exprs, tables, p)).collect();
            let t = prime(Frame::Root, &quotient_distances(quotient, false), &refs);
            let [[ff, _], _] = t;
            ff.ok_or_else(|| Error::Contract("no admissible root combination".into()))
        }
    }
}

fn vertex_of(exprs: &[Expr], e: usize) -> Vertex {
    match exprs[e] {
        Expr::Vertex(v) => v,
        _ => unreachable!("trivial part is a vertex"),
    }
}

fn assemble(plan: &Plan, tables: &[Option<Table>], root: usize, root_cell: &Cell, n: usize) -> VertexSet {
    let exprs = &plan.exprs;
    let mut w = VertexSet::new(n);
    let mut stack: Vec<(usize, Choice)> = vec![(root, root_cell.choice.clone())];
    while let Some((e, choice)) = stack.pop() {
        let push_sub = |stack: &mut Vec<(usize, Choice)>, e: usize, (p, q): Pq| {
            let cell = tables[e].as_ref().and_then(|t| t[p as usize][q as usize].clone()).expect("finite child entry");
            stack.push((e, cell.choice));
        };
        match (&exprs[e], choice) {
            (Expr::Vertex(v), _) => {
                w.insert(*v);
            }
            (Expr::Bin { a, b, .. }, Choice::Singles { take }) => {
                for (side, &x) in [*a, *b].iter().enumerate() {
                    if take[side] {
                        w.insert(vertex_of(exprs, x));
                    }
                }
            }
            (Expr::Bin { a, b, .. }, Choice::OneSingle { single, take, sub }) => {
                let (s, m) = if single == 0 { (*a, *b) } else { (*b, *a) };
                if take {
                    w.insert(vertex_of(exprs, s));
                }
                push_sub(&mut stack, m, sub);
            }
            (Expr::Bin { a, b, .. }, Choice::Pair { sub }) => {
                push_sub(&mut stack, *a, sub[0]);
                push_sub(&mut stack, *b, sub[1]);
            }
            (Expr::Prime { parts, .. }, Choice::Prime { take, sub }) => {
                for k in take {
                    w.insert(vertex_of(exprs, parts[k]));
                }
                for (k, pq) in sub {
                    push_sub(&mut stack, parts[k], pq);
                }
            }
            _ => unreachable!("choice does not match expression"),
        }
    }
    w
}

/// Exact metric dimension of a connected graph from its modular tree.
pub fn md_modular(g: &Graph, tree: &ModularTree) -> Result<MwResult> {
    if g.n() == 0 {
        return Err(Error::Contract("empty graph".into()));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let plan = plan(tree);
    let root = plan.of_node[tree.root];
    let tables = evaluate(&plan, root)?;
    let cell = root_value(&plan, &tables, root)?;
    let witness = assemble(&plan, &tables, root, &cell, g.n());
    Ok(MwResult { md: cell.val, witness, width_used: plan.width })
}

/// `w` tables of every modular tree node with at least two vertices below
/// the root, as `(module vertices, table)`.
pub fn module_tables(tree: &ModularTree) -> Result<Vec<(Vec<Vertex>, MwEntry)>> {
    let plan = plan(tree);
    let tables = evaluate(&plan, plan.exprs.len())?;
    Ok(tree
        .nodes
        .iter()
        .enumerate()
        .filter(|(_, node)| node.vertices.len() >= 2)
        .map(|(i, node)| (node.vertices.clone(), to_entry(tables[plan.of_node[i]].as_ref().expect("module table"))))
        .collect())
}

/// Distances inside `G[X]` plus a universal vertex, for `X` sorted.
pub(crate) fn augmented_distances(g: &Graph, module: &[Vertex]) -> Vec<Vec<u32>> {
    let d = all_pairs_distances(&g.induced(module));
    let k = module.len();
    (0..k).map(|i| (0..k).map(|j| if i == j { 0 } else { d.get(i, j).min(2) }).collect()).collect()
}

/// Checks that distances between different parts of every node equal the
/// quotient distances: clamped to 2 inside modules, exact at the root.
pub fn verify_module_distance_identity(g: &Graph, tree: &ModularTree) -> Vec<String> {
    let dg = all_pairs_distances(g);
    let mut bad = Vec::new();
    for (i, node) in tree.nodes.iter().enumerate() {
        if node.children.len() < 2 {
            continue;
        }
        let k = node.children.len();
        let quotient = match &node.kind {
            ModularKind::Prime { quotient } => quotient.clone(),
            ModularKind::Join => {
                let edges: Vec<(usize, usize)> = (0..k).flat_map(|a| (a + 1..k).map(move |b| (a, b))).collect();
                Graph::from_edges(k, &edges).expect("complete quotient")
            }
            _ => Graph::empty(k),
        };
        let is_root = i == tree.root;
        let dq = quotient_distances(&quotient, !is_root);
        let local = if is_root { None } else { Some(augmented_distances(g, &node.vertices)) };
        let pos = |v: Vertex| node.vertices.binary_search(&v).expect("member");
        for a in 0..k {
            for b in a + 1..k {
                for &x in &tree.nodes[node.children[a]].vertices {
                    for &y in &tree.nodes[node.children[b]].vertices {
                        let actual = match &local {
                            Some(l) => l[pos(x)][pos(y)],
                            None => dg.get(x, y),
                        };
                        if actual != dq[a][b] && bad.len() < 20 {
                            bad.push(format!("node {i}: dist({x},{y}) = {actual}, quotient says {}", dq[a][b]));
                        }
                    }
                }
            }
        }
    }
    bad
}

#[cfg(test)]
mod tests;
