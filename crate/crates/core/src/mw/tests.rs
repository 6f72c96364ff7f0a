use rand::Rng;

use super::*;
use crate::decomp::{is_module, modular_decompose};
use crate::generators::{gen, rng_for, Family};
use crate::oracle::{metric_dimension_bruteforce, verify_witness};

fn brute(g: &Graph) -> usize {
    metric_dimension_bruteforce(g, &all_pairs_distances(g), None).unwrap().md
}

/// `w(H, p, q)` straight from the definition, over every `W ⊆ V(H)`.
fn w_by_definition(dist: &[Vec<u32>]) -> MwEntry {
    let k = dist.len();
    let mut values = [[None; 2]; 2];
    for w in 1u32..1 << k {
        let has = |v: usize| w >> v & 1 == 1;
        let resolves = (0..k).all(|x| (x + 1..k).all(|y| (0..k).any(|r| has(r) && dist[r][x] != dist[r][y])));
        if !resolves {
            continue;
        }
        let all_at = |x: usize, t: u32| (0..k).all(|r| !has(r) || dist[x][r] == t);
        let p = (0..k).any(|x| all_at(x, 1));
        let q = (0..k).any(|x| all_at(x, 2));
        let slot: &mut Option<usize> = &mut values[p as usize][q as usize];
        let size = w.count_ones() as usize;
        if slot.is_none_or(|s| size < s) {
            *slot = Some(size);
        }
    }
    MwEntry { values }
}

fn inf() -> Option<usize> {
    None
}

#[test]
fn singleton_base_tables() {
    let u = mw_table(ModuleOp::Union, &[Part::Single, Part::Single]).unwrap();
    assert_eq!(u.values, [[Some(2), Some(1)], [inf(), inf()]]);
    let j = mw_table(ModuleOp::Join, &[Part::Single, Part::Single]).unwrap();
    assert_eq!(j.values, [[Some(2), inf()], [Some(1), inf()]]);
    // Both agree with the definition on two vertices.
    assert_eq!(u, w_by_definition(&[vec![0, 2], vec![2, 0]]));
    assert_eq!(j, w_by_definition(&[vec![0, 1], vec![1, 0]]));
}

#[test]
fn three_isolated_vertices() {
    let pair = mw_table(ModuleOp::Union, &[Part::Single, Part::Single]).unwrap();
    let t = mw_table(ModuleOp::Union, &[Part::Single, Part::Module(pair)]).unwrap();
    let dist: Vec<Vec<u32>> = (0..3).map(|i| (0..3).map(|j| if i == j { 0 } else { 2 }).collect()).collect();
    assert_eq!(t, w_by_definition(&dist));
    let folded = mw_table(ModuleOp::Union, &[Part::Single, Part::Single, Part::Single]).unwrap();
    assert_eq!(folded, t);
}

#[test]
fn missing_parts_are_rejected() {
    let q = gen(Family::Path, 4, 0).unwrap();
    assert!(mw_table(ModuleOp::Prime { quotient: &q }, &[Part::Single; 3]).is_err());
    assert!(mw_table(ModuleOp::Union, &[Part::Single]).is_err());
}

#[test]
fn named_examples() {
    for (g, md) in [
        (gen(Family::Complete, 4, 0).unwrap(), 3),
        (gen(Family::Star, 4, 0).unwrap(), 2),
        (gen(Family::Path, 4, 0).unwrap(), 1),
        (Graph::empty(1), 1),
        (gen(Family::Complete, 2, 0).unwrap(), 1),
    ] {
        let dec = modular_decompose(&g);
        let r = md_modular(&g, &dec.tree).unwrap();
        assert_eq!(r.md, brute(&g));
        assert_eq!(r.md, md);
        assert!(verify_witness(&g, r.md, &r.witness));
    }
    let p4 = gen(Family::Path, 4, 0).unwrap();
    assert_eq!(md_modular(&p4, &modular_decompose(&p4).tree).unwrap().width_used, 4);
}

#[test]
fn disconnected_is_rejected() {
    let g = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
    assert_eq!(md_modular(&g, &modular_decompose(&g).tree).unwrap_err(), Error::Disconnected);
}

/// Module-level checks on one graph: table against definition for small
/// modules, the witness restricted to each module, distance identity.
fn check_graph(g: &Graph) -> usize {
    let dec = modular_decompose(g);
    let r = md_modular(g, &dec.tree).unwrap();
    assert_eq!(r.md, brute(g), "graph {:?}", g.edges());
    assert!(verify_witness(g, r.md, &r.witness), "graph {:?}", g.edges());
    assert!(verify_module_distance_identity(g, &dec.tree).is_empty());
    let mut modules = 0;
    for (vertices, entry) in module_tables(&dec.tree).unwrap() {
        assert!(is_module(g, &vertices, &(0..g.n()).collect::<Vec<_>>()));
        let dist = augmented_distances(g, &vertices);
        if vertices.len() <= 7 {
            assert_eq!(entry, w_by_definition(&dist), "module {vertices:?} of {:?}", g.edges());
            modules += 1;
        }
        if vertices.len() == g.n() {
            continue;
        }
        let inside: Vec<usize> = (0..vertices.len()).filter(|&i| r.witness.contains(vertices[i])).collect();
        for x in 0..vertices.len() {
            for y in x + 1..vertices.len() {
                assert!(inside.iter().any(|&w| dist[w][x] != dist[w][y]), "witness misses {vertices:?}");
            }
        }
    }
    modules
}

fn connected_graphs(n: usize) -> impl Iterator<Item = Graph> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    (0u64..1 << pairs.len()).filter_map(move |mask| {
        let edges: Vec<(usize, usize)> = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect();
        let g = Graph::from_edges(n, &edges).unwrap();
        g.is_connected().then_some(g)
    })
}

#[test]
fn every_connected_graph_up_to_five() {
    let mut graphs = 0;
    for n in 1..=5 {
        for g in connected_graphs(n) {
            check_graph(&g);
            graphs += 1;
        }
    }
    assert_eq!(graphs, 1 + 1 + 4 + 38 + 728);
}

#[test]
fn random_cographs_and_primes() {
    let mut modules = 0;
    for seed in 0..60 {
        let g = gen(Family::RandomCograph, 5 + seed as usize % 5, seed).unwrap();
        assert_eq!(modular_decompose(&g).width, 0);
        modules += check_graph(&g);
    }
    let mut rng = rng_for(17);
    let mut tried = 0;
    while tried < 80 {
        let n = rng.gen_range(6..10);
        let edges: Vec<(usize, usize)> =
            (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).filter(|_| rng.gen_bool(0.4)).collect();
        let g = Graph::from_edges(n, &edges).unwrap();
        if g.is_connected() {
            modules += check_graph(&g);
            tried += 1;
        }
    }
    assert!(modules > 100, "{modules}");
}

#[test]
fn distance_identity_examples() {
    let c4 = gen(Family::Cycle, 4, 0).unwrap();
    let dec = modular_decompose(&c4);
    assert!(matches!(dec.tree.nodes[dec.tree.root].kind, ModularKind::Join));
    assert!(verify_module_distance_identity(&c4, &dec.tree).is_empty());
    let p4 = gen(Family::Path, 4, 0).unwrap();
    let dec = modular_decompose(&p4);
    assert!(verify_module_distance_identity(&p4, &dec.tree).is_empty());
    // A tampered quotient is noticed.
    let mut tree = dec.tree.clone();
    if let ModularKind::Prime { quotient } = &mut tree.nodes[tree.root].kind {
        *quotient = gen(Family::Cycle, 4, 0).unwrap();
    }
    assert!(!verify_module_distance_identity(&p4, &tree).is_empty());
}

#[test]
fn large_cograph_runs() {
    let g = gen(Family::RandomCograph, 600, 3).unwrap();
    let r = md_modular(&g, &modular_decompose(&g).tree).unwrap();
    assert!(verify_witness(&g, r.md, &r.witness));
}
