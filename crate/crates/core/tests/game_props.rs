use std::sync::Arc;

use proptest::prelude::*;
use pursuit::arena::play;
use pursuit::constructibility::{
    can_be_last, dismantle, dismantle_randomized, dominators, is_homomorphism, order_exists_with_prefix, search_hom,
    Certificate, CertificateJson, HomSearch,
};
use pursuit::enumerate::{connected_classes, mask_graph};
use pursuit::families::{k, two_k};
use pursuit::solver::solve;
use pursuit::strategies::{RandomWalker, SolverCop, SolverRobber};
use pursuit::suite::random_constructible;
use pursuit::FiniteGraph;

fn connected_graph() -> impl Strategy<Value = FiniteGraph> {
    (2usize..=9).prop_flat_map(|n| {
        (prop::collection::vec(0..n, n - 1), prop::collection::vec(any::<bool>(), n * (n - 1) / 2)).prop_map(
            move |(tree, extra)| {
                // A random spanning tree keeps the graph connected.
                let mut edges: Vec<_> = (1..n).map(|v| (tree[v - 1] % v, v)).collect();
                let pairs = (0..n).flat_map(|j| (0..j).map(move |i| (i, j)));
                edges.extend(pairs.zip(extra).filter(|(_, b)| *b).map(|(e, _)| e));
                FiniteGraph::unlabeled("random", n, edges).unwrap()
            },
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn removing_a_dominated_vertex_keeps_the_verdict(g in connected_graph()) {
        let Some(x) = (0..g.n()).find(|&v| !dominators(&g, v).unwrap().is_empty()) else { return Ok(()) };
        let (h, _) = g.without(x).unwrap();
        prop_assert_eq!(solve(&g, &[]).unwrap().copwin, solve(&h, &[]).unwrap().copwin);
    }

    #[test]
    fn full_prefix_is_constructibility(g in connected_graph()) {
        let all: Vec<_> = (0..g.n()).collect();
        let d = dismantle(&g).unwrap();
        prop_assert_eq!(order_exists_with_prefix(&g, &all).unwrap(), d.is_constructible());
        if let Some(cert) = d.certificate() {
            prop_assert!(order_exists_with_prefix(&g, &[cert.root()]).unwrap());
            prop_assert!(can_be_last(&g, *cert.order.last().unwrap()).unwrap());
        }
    }

    #[test]
    fn forbidding_cop_vertices_never_speeds_capture(g in connected_graph(), banned in 0usize..9) {
        let free = solve(&g, &[]).unwrap();
        let banned = banned % g.n();
        let limited = solve(&g, &[banned]).unwrap();
        if free.copwin && limited.copwin {
            prop_assert!(free.capture_time <= limited.capture_time);
        }
        prop_assert!(free.copwin || !limited.copwin);
    }

    #[test]
    fn solver_cop_meets_its_capture_time(g in connected_graph(), seed in 0u64..1000) {
        let sol = Arc::new(solve(&g, &[]).unwrap());
        if !sol.copwin {
            return Ok(());
        }
        let bound = u64::from(sol.capture_time.unwrap());
        let t = play(&g, &mut SolverCop { solution: sol.clone() }, &mut RandomWalker::default(), bound + 5, seed);
        prop_assert!(t.captured());
        prop_assert!(t.capture_turn().unwrap() <= bound);
    }
}

#[test]
fn randomized_dismantling_finds_an_order_whenever_one_exists() {
    for seed in 0..1000 {
        let (g, _) = random_constructible(2 + (seed as usize % 29), seed);
        assert!(dismantle_randomized(&g, seed).unwrap().is_constructible(), "seed {seed}");
    }
}

#[test]
fn no_randomized_certificate_of_two_k_is_a_homomorphism() {
    let g = two_k();
    assert_eq!(search_hom(&g, std::time::Duration::from_secs(60)).unwrap(), HomSearch::None);
    for seed in 0..100 {
        let d = dismantle_randomized(&g, seed).unwrap();
        assert!(!is_homomorphism(&g, d.certificate().unwrap()).unwrap(), "seed {seed}");
    }
}

#[test]
fn k_matches_its_frozen_fixtures() {
    let g = k();
    let frozen = FiniteGraph::from_json_str(include_str!("fixtures/k.json")).unwrap();
    assert_eq!(frozen.to_json(), g.to_json());
    let doc: CertificateJson = serde_json::from_str(include_str!("fixtures/k_hom_certificate.json")).unwrap();
    let cert = Certificate::from_json(&g, &doc).unwrap();
    assert!(is_homomorphism(&g, &cert).unwrap());
    match search_hom(&g, std::time::Duration::from_secs(60)).unwrap() {
        HomSearch::Found(found) => assert_eq!(found, cert),
        other => panic!("{other:?}"),
    }
}

#[test]
fn determinacy_on_small_graphs() {
    for n in 1..=6 {
        for mask in connected_classes(n) {
            let g = mask_graph(n, mask);
            let sol = Arc::new(solve(&g, &[]).unwrap());
            let horizon = 4 * n as u64 + 4;
            for seed in 0..3 {
                if sol.copwin {
                    let t = play(&g, &mut SolverCop { solution: sol.clone() }, &mut SolverRobber { solution: sol.clone() }, horizon, seed);
                    assert!(t.captured(), "{}", g.name());
                    let t = play(&g, &mut SolverCop { solution: sol.clone() }, &mut RandomWalker::default(), horizon, seed);
                    assert!(t.captured(), "{}", g.name());
                } else {
                    let t = play(&g, &mut RandomWalker::default(), &mut SolverRobber { solution: sol.clone() }, 200, seed);
                    assert!(!t.captured() && t.is_legal(), "{}", g.name());
                }
            }
        }
    }
}
