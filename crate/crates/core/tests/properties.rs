use proptest::prelude::*;

use metdim::decomp::{heuristic_td, make_nice, modular_decompose, validate_td};
use metdim::graph::{parse_edge_list, parse_labeled_edge_list};
use metdim::mw::{md_modular, verify_module_distance_identity};
use metdim::oracle::{metric_dimension_bruteforce, verify_witness};
use metdim::{all_pairs_distances, is_resolving_set, Graph, VertexSet};

/// Connected graphs on `2..=max_n` vertices: a random spanning tree plus
/// random extra edges.
fn connected(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n).prop_flat_map(|n| {
        let parents = proptest::collection::vec(any::<prop::sample::Index>(), n - 1);
        let extra = proptest::collection::vec((0..n, 0..n), 0..2 * n);
        (Just(n), parents, extra).prop_map(|(n, parents, extra)| {
            let mut edges: Vec<(usize, usize)> = parents.iter().enumerate().map(|(i, p)| (p.index(i + 1), i + 1)).collect();
            edges.extend(extra.into_iter().filter(|(a, b)| a != b));
            Graph::from_edges(n, &edges).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn modular_solver_matches_brute_force(g in connected(9)) {
        let dec = modular_decompose(&g);
        let r = md_modular(&g, &dec.tree).unwrap();
        let b = metric_dimension_bruteforce(&g, &all_pairs_distances(&g), None).unwrap();
        prop_assert_eq!(r.md, b.md);
        prop_assert!(verify_witness(&g, r.md, &r.witness));
        prop_assert!(verify_module_distance_identity(&g, &dec.tree).is_empty());
    }

    #[test]
    fn edge_list_round_trip(g in connected(20)) {
        let text = g.to_edge_list();
        prop_assert_eq!(&parse_edge_list(&text).unwrap(), &g);
        let (h, labels) = parse_labeled_edge_list(&text.lines().filter(|l| !l.starts_with('n')).collect::<Vec<_>>().join("\n")).unwrap();
        prop_assert_eq!(h.m(), g.m());
        prop_assert_eq!(labels.len(), g.n());
    }

    #[test]
    fn heuristic_decompositions_are_valid(g in connected(16), root in any::<prop::sample::Index>()) {
        let td = heuristic_td(&g);
        prop_assert!(validate_td(&g, &td).unwrap().valid);
        let nice = make_nice(&g, &td, root.index(g.n())).unwrap();
        prop_assert!(nice.validate(&g).is_ok());
    }

    #[test]
    fn resolving_sets_are_upward_closed(g in connected(10), extra in proptest::collection::vec(any::<prop::sample::Index>(), 0..4)) {
        let d = all_pairs_distances(&g);
        let b = metric_dimension_bruteforce(&g, &d, None).unwrap();
        let mut w: VertexSet = b.witness.clone();
        for i in extra {
            w.insert(i.index(g.n()));
        }
        prop_assert!(is_resolving_set(&g, &d, &w).unwrap());
    }
}
