use std::sync::Arc;

use proptest::prelude::*;
use pursuit::arena::{play, Actor};
use pursuit::constructibility::dismantle;
use pursuit::families::gee::stage_graph;
use pursuit::families::{k, make_graph, KChainOracle, Role};
use pursuit::oracle::CertifiedGraph;
use pursuit::runner::{simulate, Arena};
use pursuit::solver::solve;
use pursuit::strategies::{ConsistentCop, FiniteShadow, KEscapeRobber, RandomWalker, ShortestPathCop, SolverCop, TrailCop};
use pursuit::NeighborOracle;

#[test]
fn gee_stage_two_is_the_path_product_over_c4() {
    let (gee, coords) = stage_graph("gee", 2).unwrap();
    let pp = make_graph("ppath?base={cycle?n=4}&n=6").unwrap();
    assert_eq!(gee.n(), pp.n());
    let to_pp = |i: usize| usize::from(coords[i].get(2)) * 4 + usize::from(coords[i].get(1));
    for u in 0..gee.n() {
        for v in 0..gee.n() {
            assert_eq!(gee.is_adjacent(u, v), pp.is_adjacent(to_pp(u), to_pp(v)), "{} {}", coords[u], coords[v]);
        }
    }
}

#[test]
fn h_truncations_are_constructible() {
    for levels in 0..=2 {
        let g = make_graph(&format!("hgraph?levels={levels}")).unwrap();
        assert!(dismantle(&g).unwrap().is_constructible(), "levels={levels}");
    }
}

#[test]
fn random_play_on_k_is_legal_and_deterministic() {
    let arena = Arena::from_spec("K").unwrap();
    for seed in 0..100 {
        let a = simulate(&arena, "random", "random", 60, seed).unwrap();
        assert!(a.is_legal());
        assert_eq!(a, simulate(&arena, "random", "random", 60, seed).unwrap());
    }
}

#[test]
fn k_escape_is_caught_only_at_x() {
    let g = k();
    let sol = Arc::new(solve(&g, &[]).unwrap());
    let x = g.label(Role::X as usize).to_string();
    for seed in 0..20 {
        let t = play(&g, &mut SolverCop { solution: sol.clone() }, &mut KEscapeRobber::default(), 100, seed);
        let last_robber = t.events.iter().rev().find(|e| e.actor == Actor::Robber).unwrap();
        let reached_x = t.events.iter().any(|e| e.actor == Actor::Robber && e.key == x);
        assert!(t.is_legal());
        if t.captured() {
            let cop_last = t.events.last().unwrap();
            let capture_at = if cop_last.actor == Actor::Cop { &cop_last.key } else { &last_robber.key };
            assert!(capture_at == &x || reached_x, "caught at {capture_at}");
        }
    }
}

#[test]
fn shadow_survives_without_dominated_vertices() {
    for spec in ["cycle?n=4", "cycle?n=7", "gee?stage=1", "gee?stage=3"] {
        let g = make_graph(spec).unwrap();
        assert!((0..g.n()).all(|v| pursuit::constructibility::dominators(&g, v).unwrap().is_empty()), "{spec}");
        for seed in 0..5 {
            let t = play(&g, &mut ShortestPathCop { budget: 1000 }, &mut FiniteShadow, 300, seed);
            assert!(!t.captured() && t.is_legal(), "{spec} {:?}", t.summary);
            let t = play(&g, &mut RandomWalker::default(), &mut FiniteShadow, 300, seed);
            assert!(!t.captured() && t.is_legal(), "{spec} {:?}", t.summary);
        }
    }
}

fn certified(spec: &str) -> CertifiedGraph {
    let g = make_graph(spec).unwrap();
    let cert = dismantle(&g).unwrap().certificate().unwrap().clone();
    CertifiedGraph::new(g, &cert).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn trail_cop_captures_within_the_quadratic_bound(pick in 0usize..5, seed in 0u64..10_000) {
        let specs = ["two_k", "K", "kchain?blocks=3&hub=true", "ppath?base={cycle?n=4}&n=3", "hgraph?levels=1"];
        let cg = certified(specs[pick]);
        let n = cg.graph.n() as u64;
        let t = play(&cg, &mut TrailCop::new(), &mut FiniteShadow, n * n + 2 * n, seed);
        prop_assert!(t.captured() && t.summary.violations.is_empty(), "{:?}", t.summary);
        let t = play(&cg, &mut TrailCop::new(), &mut RandomWalker::default(), n * n + 2 * n, seed);
        prop_assert!(t.captured() && t.summary.violations.is_empty(), "{:?}", t.summary);
    }

    #[test]
    fn consistent_cop_walks_its_own_trail_in_case_two(seed in 0u64..10_000) {
        let o = KChainOracle { two_way: true };
        let t = play(&o, &mut ConsistentCop::new(), &mut RandomWalker::default(), 200, seed);
        prop_assert!(t.is_legal());
        prop_assert!(t.summary.violations.is_empty(), "{:?}", t.summary.violations);
        let cops: Vec<_> = t.events.iter().filter(|e| e.actor == Actor::Cop).collect();
        let mut seen_case_one = false;
        for pair in cops.windows(2) {
            let note = pair[1].note.as_deref().unwrap_or("");
            if note.starts_with("case=1") {
                seen_case_one = true;
            } else if note == "case=2" {
                prop_assert!(!seen_case_one);
                let prev = o.parse_key(&pair[0].key).unwrap();
                prop_assert_eq!(o.key(&o.parent(&prev).unwrap()), pair[1].key.clone());
            }
        }
    }
}
