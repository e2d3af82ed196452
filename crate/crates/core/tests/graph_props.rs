use proptest::prelude::*;
use pursuit::families::{GeeOracle, GeeVertex, HGraph, KChainOracle};
use pursuit::oracle::{ball, materialize};
use pursuit::{Distance, FiniteGraph, NeighborOracle};

fn random_graph() -> impl Strategy<Value = FiniteGraph> {
    (1usize..=12).prop_flat_map(|n| {
        prop::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            let pairs = (0..n).flat_map(|j| (0..j).map(move |i| (i, j)));
            let edges: Vec<_> = pairs.zip(bits).filter(|(_, b)| *b).map(|(e, _)| e).collect();
            FiniteGraph::unlabeled("random", n, edges).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn adjacency_is_symmetric_and_irreflexive(g in random_graph()) {
        for u in 0..g.n() {
            prop_assert!(!g.is_adjacent(u, u));
            for &v in g.neighbors(u) {
                prop_assert!(g.is_adjacent(v, u));
            }
        }
    }

    #[test]
    fn json_round_trip_is_exact(g in random_graph()) {
        let text = g.to_json_string();
        let back = FiniteGraph::from_json_str(&text).unwrap();
        prop_assert_eq!(back.to_json_string(), text);
    }

    #[test]
    fn domination_survives_induced_subgraphs(g in random_graph(), keep in prop::collection::vec(any::<bool>(), 12)) {
        for u in 0..g.n() {
            for v in 0..g.n() {
                if u == v || !g.dominates(u, v).unwrap() {
                    continue;
                }
                let set: Vec<_> = (0..g.n()).filter(|&x| x == u || x == v || keep[x]).collect();
                let (h, map) = g.induced(&set).unwrap();
                let at = |x| map.iter().position(|&y| y == x).unwrap();
                prop_assert!(h.dominates(at(u), at(v)).unwrap());
            }
        }
    }

    #[test]
    fn distance_is_one_lipschitz(g in random_graph()) {
        for w in 0..g.n() {
            let d = g.bfs(&[w]);
            for (u, v) in g.edges() {
                if let (Some(a), Some(b)) = (d[u], d[v]) {
                    prop_assert!(a.abs_diff(b) <= 1);
                } else {
                    prop_assert_eq!(d[u].is_none(), d[v].is_none());
                }
            }
        }
    }

    #[test]
    fn gee_materialized_ball_agrees_inside(coords in prop::collection::vec(0u8..4, 0..4)) {
        let mut c = coords;
        for (i, x) in c.iter_mut().enumerate() {
            if i % 2 == 1 {
                *x = (*x * 2).min(6);
            }
        }
        let v = GeeVertex::new(c).unwrap();
        check_ball(&GeeOracle, &v, 1)?;
    }
}

/// Inside the ball, materialized adjacency equals oracle adjacency.
fn check_ball<O: NeighborOracle>(o: &O, v: &O::Vertex, radius: usize) -> Result<(), TestCaseError> {
    let m = materialize(o, std::slice::from_ref(v), radius + 1, 200_000).unwrap();
    let dist = ball(o, std::slice::from_ref(v), radius + 1, 200_000).unwrap();
    let index = m.index();
    for (i, u) in m.vertices.iter().enumerate() {
        if dist[u] > radius {
            continue;
        }
        let mut want: Vec<_> = o.neighbors(u).iter().map(|w| index[w]).collect();
        want.sort_unstable();
        let got = m.graph.neighbors(i).to_vec();
        if o.locally_finite() {
            prop_assert_eq!(got, want);
        } else {
            // Only a local window of an infinite neighborhood is listed.
            prop_assert!(want.iter().all(|w| got.contains(w)));
            prop_assert!(got.iter().all(|&w| o.is_adjacent(u, &m.vertices[w])));
        }
    }
    Ok(())
}

#[test]
fn materialization_agrees_for_each_family() {
    check_ball(&KChainOracle { two_way: true }, &KChainOracle { two_way: true }.default_vertex(), 2).unwrap();
    check_ball(&GeeOracle, &GeeVertex::origin(), 1).unwrap();
    let h = HGraph::new();
    check_ball(&h, &h.default_vertex(), 1).unwrap();
}

#[test]
fn finite_distance_respects_cap() {
    let g = pursuit::graph::basic::path(6);
    assert_eq!(g.distance(0, &[5], 10).unwrap(), Distance::Exact(5));
    assert_eq!(g.distance(0, &[5], 3).unwrap(), Distance::AtLeast(3));
}

#[test]
fn h_is_locally_finite_on_samples() {
    use rand::SeedableRng;
    let h = HGraph::new();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    for _ in 0..30 {
        let v = h.sample_vertex(&mut rng);
        let n = h.neighbors(&v);
        assert!(h.locally_finite());
        assert!(!n.is_empty() && n.len() < 5_000, "{v}: {}", n.len());
        assert!(n.iter().all(|w| h.is_adjacent(&v, w) && h.is_adjacent(w, &v)));
    }
}
