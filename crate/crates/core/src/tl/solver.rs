//! Exact metric dimension by dynamic programming over a nice tree
//! decomposition of bounded length.
//!
//! One run fixes a vertex `u` that must belong to the solution and roots
//! the decomposition at `{u}`. A table entry at node `i` is keyed by the
//! solution part near `i`, the profiles on `X_i` promised by solution
//! vertices outside `G_i`, and the profiles of solution vertices hanging
//! below the nodes at depth `s`. Its value is the least number of solution
//! vertices inside `G_i`.

use std::collections::hash_map::Entry;
use std::collections::HashMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::decomp::{NiceKind, NiceTreeDecomposition};
use crate::error::{Error, Result};
use crate::graph::{all_pairs_distances, DistanceMatrix, Graph, Vertex};
use crate::tl::bounds::{degree_lower_bound, locality_radius};
use crate::tl::layout::Layout;
use crate::tl::profile::{raw_cover, raw_projection, raw_value};
use crate::vertex_set::VertexSet;

/// Which ordered partitions may appear in table keys.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ProfileDomain {
    /// Only profiles some vertex on the relevant side actually has.
    Realizable,
    /// Every partition with a non-empty first class. Exponentially larger;
    /// meant for cross-checking on tiny inputs.
    AllPartitions,
}

#[derive(Clone, Debug)]
pub struct TlConfig {
    /// Replaces the locality radius. Smaller values can undercount.
    pub s_override: Option<usize>,
    pub domain: ProfileDomain,
    /// Largest admissible predicted key count for a single node.
    pub table_ceiling: f64,
    /// Stop once this many landmarks did not suffice.
    pub max_k: Option<usize>,
}

impl Default for TlConfig {
    fn default() -> Self {
        TlConfig { s_override: None, domain: ProfileDomain::Realizable, table_ceiling: 1e9, max_k: None }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TlStats {
    pub delta: usize,
    pub ell: usize,
    pub s: usize,
    /// `None` when the closed form overflows.
    pub s_formula: Option<u64>,
    pub s_overridden: bool,
    pub root_vertex: Vertex,
    pub nice_nodes: usize,
    pub max_table: usize,
    pub total_entries: usize,
    pub k_levels: usize,
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug)]
pub struct TlResult {
    pub md: usize,
    pub witness: VertexSet,
    pub stats: TlStats,
}

/// One table entry in plain form; masks index the node's profile domains.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct TableEntry {
    pub z: Vec<Vertex>,
    pub p0: u64,
    pub far: Vec<u64>,
    pub value: u32,
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Key {
    z: VertexSet,
    p0: u64,
    far: Vec<u64>,
}

#[derive(Clone, Copy)]
enum Back {
    Leaf,
    One(u32),
    Two(u32, u32),
}

#[derive(Default)]
struct Table {
    keys: Vec<Key>,
    vals: Vec<u32>,
    back: Vec<Back>,
}

#[derive(Default)]
struct TableBuilder {
    map: HashMap<Key, (u32, Back)>,
}

impl TableBuilder {
    fn offer(&mut self, key: Key, val: u32, back: Back) {
        match self.map.entry(key) {
            Entry::Vacant(e) => {
                e.insert((val, back));
            }
            Entry::Occupied(mut e) => {
                if val < e.get().0 {
                    e.insert((val, back));
                }
            }
        }
    }

    fn freeze(self) -> Table {
        let mut items: Vec<(Key, (u32, Back))> = self.map.into_iter().collect();
        items.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        let mut t = Table::default();
        for (k, (v, b)) in items {
            t.keys.push(k);
            t.vals.push(v);
            t.back.push(b);
        }
        t
    }
}

struct Domain {
    parts: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, u8>,
}

impl Domain {
    fn new(mut parts: Vec<Vec<u8>>) -> Self {
        parts.sort_unstable();
        parts.dedup();
        let index = parts.iter().enumerate().map(|(i, p)| (p.clone(), i as u8)).collect();
        Domain { parts, index }
    }

    fn get(&self, p: &[u8]) -> Option<u8> {
        self.index.get(p).copied()
    }

    fn len(&self) -> usize {
        self.parts.len()
    }
}

fn all_partitions(size: usize, depth: usize) -> Vec<Vec<u8>> {
    let mut out = vec![Vec::new()];
    for _ in 0..size {
        out = out.into_iter().flat_map(|p| (0..=depth as u8).map(move |c| [p.clone(), vec![c]].concat())).collect();
    }
    out.retain(|p| p.contains(&0));
    out
}

fn bits(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            return None;
        }
        let b = m.trailing_zeros() as usize;
        m &= m - 1;
        Some(b)
    })
}

fn low_bits(len: usize) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

fn map_mask(m: u64, map: &[u8]) -> u64 {
    bits(m).fold(0, |acc, b| acc | 1u64 << map[b])
}

/// All subsets of `m`, including the empty one.
fn subsets(m: u64) -> impl Iterator<Item = u64> {
    let mut next = Some(m);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 { None } else { Some((cur - 1) & m) };
        Some(cur)
    })
}

/// Masks over the parent domain whose image under the cover map is exactly
/// `target`, except that bits in `optional` may be missing from the image.
fn preimages(pre: &[u64], target: u64, optional: u64) -> Vec<u64> {
    let mut out = vec![0u64];
    for t in bits(target) {
        let must = optional & (1 << t) == 0;
        if must && pre[t] == 0 {
            return Vec::new();
        }
        let mut next = Vec::with_capacity(out.len() << pre[t].count_ones());
        for &acc in &out {
            for sub in subsets(pre[t]) {
                if !(must && sub == 0) {
                    next.push(acc | sub);
                }
            }
        }
        out = next;
    }
    out
}

/// How the profiles below one node at depth `s` of the parent are derived
/// from the child's key.
struct RItem {
    /// (child slot, position in the child's far list, domain map).
    sources: Vec<(usize, usize, Vec<u8>)>,
    forget: Option<(Vertex, u8)>,
}

struct StarCheck {
    resolvers: VertexSet,
    res0: u64,
    res_far: Vec<u64>,
}

enum FarCond {
    Mask(u64),
    NonEmpty,
}

struct PairCheck {
    resolvers: VertexSet,
    res0: u64,
    far: Vec<FarCond>,
}

enum Step {
    Leaf,
    Introduce { v: Vertex, pre: Vec<u64>, tv: Option<u8>, star: Vec<StarCheck> },
    Forget { pre: Vec<u64> },
    Join(Box<JoinStep>),
}

struct JoinStep {
    a_to_u: Vec<u8>,
    b_to_u: Vec<u8>,
    u_to_i: Vec<Option<u8>>,
    d_mask: u64,
    /// Per child: bit in the union domain of each far-list profile.
    far_to_u: [Vec<Vec<u8>>; 2],
    vertex_to_u: [Vec<Option<u8>>; 2],
    pairs: Vec<PairCheck>,
}

/// Everything about one rooted decomposition that does not depend on `k`.
struct Prep<'a> {
    d: &'a DistanceMatrix,
    nice: NiceTreeDecomposition,
    layout: Layout,
    u: Vertex,
    ell: usize,
    s: usize,
    s_formula: Option<u64>,
    out_dom: Vec<Domain>,
    in_dom: Vec<Domain>,
    u_bit: Vec<Option<u8>>,
    r_plan: Vec<Vec<RItem>>,
    steps: Vec<Step>,
}

fn contract(msg: String) -> Error {
    Error::Contract(msg)
}

impl<'a> Prep<'a> {
    fn new(g: &Graph, d: &'a DistanceMatrix, nice: NiceTreeDecomposition, cfg: &TlConfig) -> Result<Self> {
        let n = g.n();
        if nice.nodes.iter().any(|x| x.bag.is_empty()) {
            return Err(contract("decomposition has an empty bag".into()));
        }
        let u = nice.root_vertex();
        let ell = nice.nodes.iter().map(|x| d.diameter_of(&x.bag) as usize).max().unwrap_or(0).max(1);
        if ell > u8::MAX as usize {
            return Err(contract(format!("decomposition length {ell} is too large")));
        }
        let delta = g.max_degree().max(1) as u64;
        let s_formula = locality_radius(delta, ell as u64).ok();
        let s = match cfg.s_override {
            Some(0) => return Err(contract("s must be positive".into())),
            Some(s) => s,
            None => s_formula.and_then(|x| usize::try_from(x).ok()).unwrap_or(usize::MAX),
        };
        let layout = Layout::new(&nice, s);

        let mut out_dom = Vec::with_capacity(nice.len());
        let mut in_dom = Vec::with_capacity(nice.len());
        for (i, node) in nice.nodes.iter().enumerate() {
            let (outside, inside) = match cfg.domain {
                ProfileDomain::Realizable => {
                    let proj = |w: Vertex| raw_projection(d, w, &node.bag);
                    let outside = (0..n).filter(|&w| !layout.sub[i].contains(w)).map(proj).collect();
                    (outside, layout.below[i].iter().map(proj).collect())
                }
                ProfileDomain::AllPartitions => {
                    let all = all_partitions(node.bag.len(), ell);
                    (all.clone(), all)
                }
            };
            out_dom.push(Domain::new(outside));
            in_dom.push(Domain::new(inside));
        }
        let u_bit = nice
            .nodes
            .iter()
            .enumerate()
            .map(|(i, node)| {
                if node.bag.contains(&u) {
                    return Ok(None);
                }
                out_dom[i].get(&raw_projection(d, u, &node.bag)).map(Some).ok_or_else(|| contract("profile of u missing".into()))
            })
            .collect::<Result<Vec<_>>>()?;

        let mut prep = Prep { d, nice, layout, u, ell, s, s_formula, out_dom, in_dom, u_bit, r_plan: Vec::new(), steps: Vec::new() };
        prep.check_domain_sizes()?;
        for i in 0..prep.nice.len() {
            let plan = prep.build_r_plan(i)?;
            prep.r_plan.push(plan);
            let step = prep.build_step(i)?;
            prep.steps.push(step);
        }
        Ok(prep)
    }

    fn check_domain_sizes(&self) -> Result<()> {
        for i in 0..self.nice.len() {
            let big = self.out_dom[i].len().max(self.in_dom[i].len());
            if big > 64 {
                return Err(contract(format!("node {i} has {big} candidate profiles; at most 64 are supported")));
            }
        }
        Ok(())
    }

    fn predicted(&self, i: usize, k: usize) -> f64 {
        let y = self.layout.y[i].len();
        let mut binom = 1.0f64;
        let mut zs = 1.0f64;
        for t in 1..=k.min(y) {
            binom = binom * (y + 1 - t) as f64 / t as f64;
            zs += binom;
        }
        let mut bits_total = self.out_dom[i].len() as i32;
        for &j in &self.layout.far[i] {
            bits_total += self.in_dom[j].len() as i32;
        }
        zs * 2f64.powi(bits_total)
    }

    fn cover_index(&self, from_bag: &[Vertex], cls: &[u8], to_bag: &[Vertex], dom: &Domain, what: &str) -> Result<u8> {
        raw_cover(self.d, from_bag, cls, to_bag, self.ell)
            .and_then(|c| dom.get(&c))
            .ok_or_else(|| contract(format!("cover left the {what} profile domain")))
    }

    fn build_r_plan(&self, i: usize) -> Result<Vec<RItem>> {
        let node = &self.nice.nodes[i];
        let mut plan = Vec::new();
        for &j in &self.layout.far[i] {
            let slot = node
                .children
                .iter()
                .position(|&c| self.layout.near[c].contains(&j))
                .ok_or_else(|| contract(format!("node {j} is not one level above the child horizon")))?;
            let c = node.children[slot];
            let pos_in = |jj: usize| self.layout.far[c].iter().position(|&x| x == jj).expect("grandchild on the horizon");
            let nj = &self.nice.nodes[j];
            let mut item = RItem { sources: Vec::new(), forget: None };
            match nj.kind {
                NiceKind::Leaf => {}
                NiceKind::Introduce(_) | NiceKind::Forget(_) => {
                    let jc = nj.children[0];
                    let src_bag = &self.nice.nodes[jc].bag;
                    let map = self.in_dom[jc]
                        .parts
                        .iter()
                        .map(|p| self.cover_index(src_bag, p, &nj.bag, &self.in_dom[j], "inner"))
                        .collect::<Result<Vec<u8>>>()?;
                    item.sources.push((slot, pos_in(jc), map));
                    if let NiceKind::Forget(v) = nj.kind {
                        let bit = self.in_dom[j]
                            .get(&raw_projection(self.d, v, &nj.bag))
                            .ok_or_else(|| contract("forgotten vertex profile missing".into()))?;
                        item.forget = Some((v, bit));
                    }
                }
                NiceKind::Join => {
                    for &jc in &nj.children {
                        let map = self.in_dom[jc]
                            .parts
                            .iter()
                            .map(|p| self.in_dom[j].get(p).ok_or_else(|| contract("join profile missing".into())))
                            .collect::<Result<Vec<u8>>>()?;
                        item.sources.push((slot, pos_in(jc), map));
                    }
                }
            }
            plan.push(item);
        }
        Ok(plan)
    }

    fn preimage_table(&self, i: usize, c: usize) -> Result<Vec<u64>> {
        let bag = &self.nice.nodes[i].bag;
        let cbag = &self.nice.nodes[c].bag;
        let mut pre = vec![0u64; self.out_dom[c].len()];
        for (a, p) in self.out_dom[i].parts.iter().enumerate() {
            let t = self.cover_index(bag, p, cbag, &self.out_dom[c], "outer")?;
            pre[t as usize] |= 1 << a;
        }
        Ok(pre)
    }

    fn resolvers(&self, x: Vertex, y: Vertex) -> VertexSet {
        let n = self.d.n();
        let mut s = VertexSet::new(n);
        for z in 0..n {
            if self.d.get(z, x) != self.d.get(z, y) {
                s.insert(z);
            }
        }
        s
    }

    fn resolving_mask(&self, dom: &Domain, bag: &[Vertex], x: Vertex, y: Vertex) -> u64 {
        dom.parts
            .iter()
            .enumerate()
            .filter(|(_, p)| raw_value(self.d, bag, p, x) != raw_value(self.d, bag, p, y))
            .fold(0, |m, (b, _)| m | 1 << b)
    }

    fn build_step(&self, i: usize) -> Result<Step> {
        let node = &self.nice.nodes[i];
        let far = &self.layout.far[i];
        Ok(match node.kind {
            NiceKind::Leaf => Step::Leaf,
            NiceKind::Introduce(v) => {
                let c = node.children[0];
                let pre = self.preimage_table(i, c)?;
                let tv = self.out_dom[c].get(&raw_projection(self.d, v, &self.nice.nodes[c].bag));
                let star = self.layout.y[i]
                    .iter()
                    .filter(|&x| x != v)
                    .map(|x| StarCheck {
                        resolvers: self.resolvers(v, x),
                        res0: self.resolving_mask(&self.out_dom[i], &node.bag, v, x),
                        res_far: far
                            .iter()
                            .map(|&h| self.resolving_mask(&self.in_dom[h], &self.nice.nodes[h].bag, v, x))
                            .collect(),
                    })
                    .collect();
                Step::Introduce { v, pre, tv, star }
            }
            NiceKind::Forget(_) => Step::Forget { pre: self.preimage_table(i, node.children[0])? },
            NiceKind::Join => Step::Join(Box::new(self.build_join(i)?)),
        })
    }

    fn build_join(&self, i: usize) -> Result<JoinStep> {
        let node = &self.nice.nodes[i];
        let (a, b) = (node.children[0], node.children[1]);
        let bag = &node.bag;
        let union = Domain::new(self.out_dom[a].parts.iter().chain(&self.out_dom[b].parts).cloned().collect());
        if union.len() > 64 {
            return Err(contract(format!("join node {i} has {} candidate profiles", union.len())));
        }
        let to_u = |dom: &Domain| -> Vec<u8> { dom.parts.iter().map(|p| union.get(p).expect("in union")).collect() };
        let (a_to_u, b_to_u, i_to_u) = (to_u(&self.out_dom[a]), to_u(&self.out_dom[b]), to_u(&self.out_dom[i]));
        let mut u_to_i = vec![None; union.len()];
        for (k, &ub) in i_to_u.iter().enumerate() {
            u_to_i[ub as usize] = Some(k as u8);
        }
        let d_mask = i_to_u.iter().fold(0u64, |m, &ub| m | 1 << ub);

        let mut far_to_u: [Vec<Vec<u8>>; 2] = [Vec::new(), Vec::new()];
        let mut vertex_to_u: [Vec<Option<u8>>; 2] = [vec![None; self.d.n()], vec![None; self.d.n()]];
        for (slot, &c) in [a, b].iter().enumerate() {
            for &j in &self.layout.far[c] {
                let jb = &self.nice.nodes[j].bag;
                let map = self.in_dom[j]
                    .parts
                    .iter()
                    .map(|p| self.cover_index(jb, p, bag, &union, "join"))
                    .collect::<Result<Vec<u8>>>()?;
                far_to_u[slot].push(map);
            }
            for w in self.layout.below[c].iter() {
                vertex_to_u[slot][w] = union.get(&raw_projection(self.d, w, bag));
            }
        }

        let far = &self.layout.far[i];
        let mut pairs = Vec::new();
        for x in self.layout.below[a].iter() {
            for y in self.layout.below[b].iter() {
                let conds = far
                    .iter()
                    .map(|&h| {
                        let bh = &self.layout.below[h];
                        if bh.contains(x) || bh.contains(y) {
                            FarCond::NonEmpty
                        } else {
                            FarCond::Mask(self.resolving_mask(&self.in_dom[h], &self.nice.nodes[h].bag, x, y))
                        }
                    })
                    .collect();
                pairs.push(PairCheck {
                    resolvers: self.resolvers(x, y),
                    res0: self.resolving_mask(&self.out_dom[i], bag, x, y),
                    far: conds,
                });
            }
        }
        Ok(JoinStep { a_to_u, b_to_u, u_to_i, d_mask, far_to_u, vertex_to_u, pairs })
    }

    /// Far-list masks for node `i` from the keys of its children.
    fn far_masks(&self, i: usize, child_keys: [Option<&Key>; 2]) -> Vec<u64> {
        self.r_plan[i]
            .iter()
            .map(|item| {
                let mut m = 0u64;
                for (slot, pos, map) in &item.sources {
                    let key = child_keys[*slot].expect("child key");
                    m |= map_mask(key.far[*pos], map);
                }
                if let Some((v, bit)) = item.forget {
                    let slot = item.sources.first().map(|s| s.0).unwrap_or(0);
                    if child_keys[slot].expect("child key").z.contains(v) {
                        m |= 1 << bit;
                    }
                }
                m
            })
            .collect()
    }

    fn leaf(&self, i: usize, k: usize) -> Table {
        let x = self.nice.nodes[i].bag[0];
        let n = self.d.n();
        let mut tb = TableBuilder::default();
        let zs: Vec<VertexSet> = if x == self.u {
            vec![VertexSet::from_slice(n, &[x])]
        } else {
            vec![VertexSet::new(n), VertexSet::from_slice(n, &[x])]
        };
        let full = low_bits(self.out_dom[i].len());
        for z in zs {
            let val = z.len() as u32;
            if val as usize > k {
                continue;
            }
            for p0 in subsets(full) {
                if self.u_bit[i].is_some_and(|b| p0 & (1 << b) == 0) {
                    continue;
                }
                tb.offer(Key { z: z.clone(), p0, far: Vec::new() }, val, Back::Leaf);
            }
        }
        tb.freeze()
    }

    fn introduce(&self, i: usize, child: &Table, k: usize) -> Table {
        let Step::Introduce { v, pre, tv, star } = &self.steps[i] else { unreachable!() };
        let (v, tv) = (*v, *tv);
        let y = &self.layout.y[i];
        let mut tb = TableBuilder::default();
        for (idx, key) in child.keys.iter().enumerate() {
            let val = child.vals[idx];
            let far = self.far_masks(i, [Some(key), None]);
            let z_near = key.z.intersection(y);
            let back = Back::One(idx as u32);
            if v != self.u {
                // v stays out of the solution: every pair (v, x) near i must
                // already be told apart.
                let open: Vec<u64> = star
                    .iter()
                    .filter(|c| !c.resolvers.intersects(&z_near) && !c.res_far.iter().zip(&far).any(|(m, f)| m & f != 0))
                    .map(|c| c.res0)
                    .collect();
                for p0 in preimages(pre, key.p0, 0) {
                    if self.u_bit[i].is_some_and(|b| p0 & (1 << b) == 0) {
                        continue;
                    }
                    if open.iter().all(|&m| m & p0 != 0) {
                        tb.offer(Key { z: z_near.clone(), p0, far: far.clone() }, val, back);
                    }
                }
            }
            if let Some(tv) = tv {
                if (val as usize) < k && key.p0 & (1 << tv) != 0 {
                    let mut z = z_near.clone();
                    z.insert(v);
                    for p0 in preimages(pre, key.p0, 1 << tv) {
                        if self.u_bit[i].is_some_and(|b| p0 & (1 << b) == 0) {
                            continue;
                        }
                        tb.offer(Key { z: z.clone(), p0, far: far.clone() }, val + 1, back);
                    }
                }
            }
        }
        tb.freeze()
    }

    fn forget(&self, i: usize, child: &Table) -> Table {
        let Step::Forget { pre } = &self.steps[i] else { unreachable!() };
        let y = &self.layout.y[i];
        let mut tb = TableBuilder::default();
        for (idx, key) in child.keys.iter().enumerate() {
            let far = self.far_masks(i, [Some(key), None]);
            let z = key.z.intersection(y);
            for p0 in preimages(pre, key.p0, 0) {
                if self.u_bit[i].is_some_and(|b| p0 & (1 << b) == 0) {
                    continue;
                }
                tb.offer(Key { z: z.clone(), p0, far: far.clone() }, child.vals[idx], Back::One(idx as u32));
            }
        }
        tb.freeze()
    }

    fn join(&self, i: usize, ta: &Table, tb_child: &Table, k: usize) -> Table {
        let Step::Join(js) = &self.steps[i] else { unreachable!() };
        let bag = &self.nice.nodes[i].bag;
        let n = self.d.n();
        let bag_set = VertexSet::from_slice(n, bag);
        let y = &self.layout.y[i];
        let (a, b) = (self.nice.nodes[i].children[0], self.nice.nodes[i].children[1]);

        // Profiles on X_i of the solution part strictly inside each child.
        let inner = |slot: usize, c: usize, key: &Key| -> u64 {
            let mut m = 0u64;
            for (pos, map) in js.far_to_u[slot].iter().enumerate() {
                m |= map_mask(key.far[pos], map);
            }
            for w in key.z.iter() {
                if self.layout.below[c].contains(w) {
                    m |= 1 << js.vertex_to_u[slot][w].expect("inner vertex profile");
                }
            }
            m
        };
        let group = |t: &Table| -> HashMap<VertexSet, Vec<usize>> {
            let mut g: HashMap<VertexSet, Vec<usize>> = HashMap::new();
            for (idx, key) in t.keys.iter().enumerate() {
                g.entry(key.z.intersection(&bag_set)).or_default().push(idx);
            }
            g
        };
        let ga = group(ta);
        let gb = group(tb_child);
        let sa: Vec<u64> = ta.keys.iter().map(|key| inner(0, a, key)).collect();
        let sb: Vec<u64> = tb_child.keys.iter().map(|key| inner(1, b, key)).collect();
        let pa: Vec<u64> = ta.keys.iter().map(|key| map_mask(key.p0, &js.a_to_u)).collect();
        let pb: Vec<u64> = tb_child.keys.iter().map(|key| map_mask(key.p0, &js.b_to_u)).collect();

        let mut out = TableBuilder::default();
        let mut shared: Vec<&VertexSet> = ga.keys().filter(|z| gb.contains_key(*z)).collect();
        shared.sort();
        for zx in shared {
            let overlap = zx.len() as u32;
            for &ia in &ga[zx] {
                let ka = &ta.keys[ia];
                for &ib in &gb[zx] {
                    let kb = &tb_child.keys[ib];
                    let val = ta.vals[ia] + tb_child.vals[ib] - overlap;
                    if val as usize > k {
                        continue;
                    }
                    let (p1, p2, s1, s2) = (pa[ia], pb[ib], sa[ia], sb[ib]);
                    if s2 & !p1 != 0 || s1 & !p2 != 0 {
                        continue;
                    }
                    let required = (p1 & !s2) | (p2 & !s1);
                    if required & !(p1 & p2) != 0 || required & !js.d_mask != 0 {
                        continue;
                    }
                    let optional = p1 & p2 & !required & js.d_mask;
                    let mut z = ka.z.union(&kb.z);
                    z.intersect_with(y);
                    let far = self.far_masks(i, [Some(ka), Some(kb)]);
                    let open: Vec<u64> = js
                        .pairs
                        .iter()
                        .filter(|pc| {
                            !pc.resolvers.intersects(&z)
                                && !pc.far.iter().zip(&far).any(|(c, &f)| match c {
                                    FarCond::Mask(m) => m & f != 0,
                                    FarCond::NonEmpty => f != 0,
                                })
                        })
                        .map(|pc| pc.res0)
                        .collect();
                    for extra in subsets(optional) {
                        let p_u = required | extra;
                        let p0 = bits(p_u).fold(0u64, |m, ub| m | 1 << js.u_to_i[ub].expect("in parent domain"));
                        if self.u_bit[i].is_some_and(|bit| p0 & (1 << bit) == 0) {
                            continue;
                        }
                        if open.iter().all(|&m| m & p0 != 0) {
                            out.offer(Key { z: z.clone(), p0, far: far.clone() }, val, Back::Two(ia as u32, ib as u32));
                        }
                    }
                }
            }
        }
        out.freeze()
    }

    fn run(&self, k: usize, ceiling: f64) -> Result<RootedRun> {
        for i in 0..self.nice.len() {
            let predicted = self.predicted(i, k);
            if predicted > ceiling {
                return Err(Error::TableBudgetExceeded { node: i, predicted, ceiling });
            }
        }
        let mut tables: Vec<Table> = Vec::with_capacity(self.nice.len());
        for (i, node) in self.nice.nodes.iter().enumerate() {
            let t = match node.kind {
                NiceKind::Leaf => self.leaf(i, k),
                NiceKind::Introduce(_) => self.introduce(i, &tables[node.children[0]], k),
                NiceKind::Forget(_) => self.forget(i, &tables[node.children[0]]),
                NiceKind::Join => self.join(i, &tables[node.children[0]], &tables[node.children[1]], k),
            };
            tables.push(t);
        }
        let root = self.nice.root;
        let best = (0..tables[root].keys.len())
            .filter(|&e| tables[root].keys[e].p0 == 0)
            .min_by_key(|&e| (tables[root].vals[e], e));
        let best = best.map(|e| (tables[root].vals[e] as usize, self.witness(&tables, e)));
        Ok(RootedRun { best, tables, far_len: self.layout.far.iter().map(Vec::len).collect() })
    }

    fn witness(&self, tables: &[Table], entry: usize) -> VertexSet {
        let mut w = VertexSet::new(self.d.n());
        let mut stack = vec![(self.nice.root, entry)];
        while let Some((i, e)) = stack.pop() {
            w.union_with(&tables[i].keys[e].z);
            let ch = &self.nice.nodes[i].children;
            match tables[i].back[e] {
                Back::Leaf => {}
                Back::One(c) => stack.push((ch[0], c as usize)),
                Back::Two(c1, c2) => {
                    stack.push((ch[0], c1 as usize));
                    stack.push((ch[1], c2 as usize));
                }
            }
        }
        w
    }
}

/// Tables of one run with a fixed root vertex and landmark budget.
pub struct RootedRun {
    /// Least root value and a witness, if some entry fits the budget.
    pub best: Option<(usize, VertexSet)>,
    tables: Vec<Table>,
    far_len: Vec<usize>,
}

impl RootedRun {
    pub fn table_sizes(&self) -> Vec<usize> {
        self.tables.iter().map(|t| t.keys.len()).collect()
    }

    pub fn entries(&self, node: usize) -> Vec<TableEntry> {
        let t = &self.tables[node];
        debug_assert!(t.keys.iter().all(|k| k.far.len() == self.far_len[node]));
        t.keys
            .iter()
            .zip(&t.vals)
            .map(|(k, &v)| TableEntry { z: k.z.to_vec(), p0: k.p0, far: k.far.clone(), value: v })
            .collect()
    }
}

/// Runs the tables once for the decomposition's own root vertex, keeping
/// only values `<= k`.
pub fn run_rooted(g: &Graph, nice: &NiceTreeDecomposition, cfg: &TlConfig, k: usize) -> Result<RootedRun> {
    let d = all_pairs_distances(g);
    nice.validate_with(g, &d)?;
    Prep::new(g, &d, nice.clone(), cfg)?.run(k, cfg.table_ceiling)
}

/// Exact metric dimension of a connected graph. `nice_for(u)` must return a
/// nice decomposition rooted at `{u}`; every `u` is tried.
pub fn solve_tl<F>(g: &Graph, nice_for: F, cfg: &TlConfig) -> Result<TlResult>
where
    F: Fn(Vertex) -> Result<NiceTreeDecomposition> + Sync,
{
    let start = Instant::now();
    let n = g.n();
    if n == 0 {
        return Err(contract("empty graph".into()));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let d = all_pairs_distances(g);
    if n == 1 {
        let stats = TlStats {
            delta: 0,
            ell: 0,
            s: cfg.s_override.unwrap_or(0),
            s_formula: None,
            s_overridden: cfg.s_override.is_some(),
            root_vertex: 0,
            nice_nodes: 1,
            max_table: 1,
            total_entries: 1,
            k_levels: 0,
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        };
        return Ok(TlResult { md: 1, witness: VertexSet::from_slice(1, &[0]), stats });
    }
    let preps = (0..n)
        .into_par_iter()
        .map(|u| {
            let nice = nice_for(u)?;
            nice.validate_with(g, &d)?;
            if nice.root_vertex() != u {
                return Err(contract(format!("decomposition for {u} is rooted at {}", nice.root_vertex())));
            }
            Prep::new(g, &d, nice, cfg)
        })
        .collect::<Result<Vec<_>>>()?;

    let lo = degree_lower_bound(g.max_degree());
    let hi = cfg.max_k.unwrap_or(n - 1).min(n - 1);
    for k in lo..=hi {
        let found = preps.par_iter().find_map_first(|p| match p.run(k, cfg.table_ceiling) {
            Ok(run) => {
                let sizes = run.table_sizes();
                run.best.map(|b| Ok((p, b, sizes)))
            }
            Err(e) => Some(Err(e)),
        });
        if let Some(res) = found {
            let (p, (md, witness), sizes) = res?;
            let stats = TlStats {
                delta: g.max_degree(),
                ell: p.ell,
                s: p.s,
                s_formula: p.s_formula,
                s_overridden: cfg.s_override.is_some(),
                root_vertex: p.u,
                nice_nodes: p.nice.len(),
                max_table: sizes.iter().copied().max().unwrap_or(0),
                total_entries: sizes.iter().sum(),
                k_levels: k + 1 - lo,
                elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
            };
            return Ok(TlResult { md, witness, stats });
        }
    }
    Err(Error::ExceedsBudget { budget: hi })
}

/// [`solve_tl`] with nice decompositions derived from one plain decomposition.
pub fn solve_tl_with_td(g: &Graph, td: &crate::decomp::TreeDecomposition, cfg: &TlConfig) -> Result<TlResult> {
    solve_tl(g, |u| crate::decomp::make_nice(g, td, u), cfg)
}
