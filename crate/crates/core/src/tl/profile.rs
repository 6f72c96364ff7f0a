//! Distance profiles: ordered partitions of a vertex set by relative
//! distance from an outside vertex.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::decomp::{NiceKind, NiceTreeDecomposition};
use crate::error::{Error, Result};
use crate::graph::{DistanceMatrix, Vertex};
use crate::tl::layout::Layout;
use crate::vertex_set::VertexSet;

/// Partition of a sorted base set into classes `0..=depth`; some classes may
/// be empty. Ordered lexicographically on the class contents.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct OrderedPartition {
    base: Vec<Vertex>,
    class_of: Vec<u8>,
    depth: usize,
}

pub type ProfileSet = BTreeSet<OrderedPartition>;

impl OrderedPartition {
    /// `classes` must have `depth + 1` disjoint entries with a non-empty union.
    pub fn new(depth: usize, classes: Vec<Vec<Vertex>>) -> Result<Self> {
        if classes.len() != depth + 1 || depth > u8::MAX as usize {
            return Err(Error::Contract(format!("expected {} classes", depth + 1)));
        }
        let mut pairs: Vec<(Vertex, u8)> =
            classes.iter().enumerate().flat_map(|(c, cl)| cl.iter().map(move |&v| (v, c as u8))).collect();
        pairs.sort_unstable();
        if pairs.is_empty() || pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Contract("classes must be disjoint with a non-empty union".into()));
        }
        let (base, class_of) = pairs.into_iter().unzip();
        Ok(OrderedPartition { base, class_of, depth })
    }

    pub(crate) fn from_raw(base: Vec<Vertex>, class_of: Vec<u8>, depth: usize) -> Self {
        OrderedPartition { base, class_of, depth }
    }

    pub fn base(&self) -> &[Vertex] {
        &self.base
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn class_of(&self, v: Vertex) -> Option<usize> {
        self.base.binary_search(&v).ok().map(|i| self.class_of[i] as usize)
    }

    pub fn classes(&self) -> Vec<Vec<Vertex>> {
        let mut out = vec![Vec::new(); self.depth + 1];
        for (&v, &c) in self.base.iter().zip(&self.class_of) {
            out[c as usize].push(v);
        }
        out
    }

    /// Distance from `x` to a hypothetical vertex with this profile, up to a
    /// constant shift common to all `x` separated from it by the base.
    pub fn value(&self, d: &DistanceMatrix, x: Vertex) -> u32 {
        raw_value(d, &self.base, &self.class_of, x)
    }
}

impl Ord for OrderedPartition {
    fn cmp(&self, other: &Self) -> Ordering {
        self.classes().cmp(&other.classes()).then(self.depth.cmp(&other.depth))
    }
}

impl PartialOrd for OrderedPartition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for OrderedPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.classes())
    }
}

pub(crate) fn raw_value(d: &DistanceMatrix, base: &[Vertex], cls: &[u8], x: Vertex) -> u32 {
    base.iter().zip(cls).map(|(&b, &c)| c as u32 + d.get(b, x)).min().expect("non-empty base")
}

/// Class vector of `w` over `bag`, shifted so the closest members are class 0.
pub(crate) fn raw_projection(d: &DistanceMatrix, w: Vertex, bag: &[Vertex]) -> Vec<u8> {
    let dist: Vec<u32> = bag.iter().map(|&x| d.get(w, x)).collect();
    let lo = *dist.iter().min().expect("non-empty bag");
    dist.iter().map(|&x| (x - lo).min(u8::MAX as u32) as u8).collect()
}

/// Class vector on `target` induced by a profile on `base`. `None` if some
/// offset exceeds `depth`.
pub(crate) fn raw_cover(d: &DistanceMatrix, base: &[Vertex], cls: &[u8], target: &[Vertex], depth: usize) -> Option<Vec<u8>> {
    let f: Vec<u32> = target.iter().map(|&x| raw_value(d, base, cls, x)).collect();
    let lo = *f.iter().min()?;
    f.iter().map(|&x| if (x - lo) as usize <= depth { Some((x - lo) as u8) } else { None }).collect()
}

fn sorted_set(x_set: &[Vertex]) -> Result<Vec<Vertex>> {
    let mut xs = x_set.to_vec();
    xs.sort_unstable();
    xs.dedup();
    if xs.is_empty() {
        return Err(Error::Contract("profile base must be non-empty".into()));
    }
    Ok(xs)
}

/// Profile of `v` on `x_set`. Needs `diam(x_set) <= depth`.
pub fn project(d: &DistanceMatrix, v: Vertex, x_set: &[Vertex], depth: usize) -> Result<OrderedPartition> {
    let xs = sorted_set(x_set)?;
    if d.diameter_of(&xs) as usize > depth || depth > u8::MAX as usize {
        return Err(Error::Contract(format!("set {xs:?} has diameter above {depth}")));
    }
    let cls = raw_projection(d, v, &xs);
    Ok(OrderedPartition::from_raw(xs, cls, depth))
}

/// The profile on `x_prime` of any vertex whose profile on `part.base()`
/// is `part` and which `part.base()` separates from `x_prime`.
pub fn cover(d: &DistanceMatrix, part: &OrderedPartition, x_prime: &[Vertex], depth: usize) -> Result<OrderedPartition> {
    let xs = sorted_set(x_prime)?;
    if part.base.is_empty() {
        return Err(Error::Contract("partition has only empty classes".into()));
    }
    let cls = raw_cover(d, &part.base, &part.class_of, &xs, depth)
        .ok_or_else(|| Error::Contract(format!("cover onto {xs:?} needs more than {} classes", depth + 1)))?;
    Ok(OrderedPartition::from_raw(xs, cls, depth))
}

/// Whether a vertex with profile `part` distinguishes `x` and `y`, both
/// separated from it by the base.
pub fn resolved_across(d: &DistanceMatrix, part: &OrderedPartition, x: Vertex, y: Vertex) -> bool {
    debug_assert_ne!(x, y);
    part.value(d, x) != part.value(d, y)
}

/// Profiles on the bags of the nodes at depth `s - 1` below `i`, given the
/// profiles at depth `s` and the solution vertices `z` near `i`.
pub fn build_r(
    nice: &NiceTreeDecomposition,
    layout: &Layout,
    d: &DistanceMatrix,
    i: usize,
    z: &VertexSet,
    profiles: &BTreeMap<usize, ProfileSet>,
    depth: usize,
) -> Result<BTreeMap<usize, ProfileSet>> {
    let keys: Vec<usize> = profiles.keys().copied().collect();
    if keys != layout.far[i] {
        return Err(Error::Contract(format!("profiles keyed by {keys:?}, expected {:?}", layout.far[i])));
    }
    let mut out = BTreeMap::new();
    for &j in &layout.near[i] {
        let node = &nice.nodes[j];
        let lift = |c: usize| -> Result<ProfileSet> {
            profiles[&c].iter().map(|p| cover(d, p, &node.bag, depth)).collect()
        };
        let set = match node.kind {
            NiceKind::Leaf => ProfileSet::new(),
            NiceKind::Introduce(_) => lift(node.children[0])?,
            NiceKind::Forget(v) => {
                let mut s = lift(node.children[0])?;
                if z.contains(v) {
                    s.insert(project(d, v, &node.bag, depth)?);
                }
                s
            }
            NiceKind::Join => {
                let mut s = profiles[&node.children[0]].clone();
                s.extend(profiles[&node.children[1]].iter().cloned());
                s
            }
        };
        out.insert(j, set);
    }
    Ok(out)
}
