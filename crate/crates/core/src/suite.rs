//! Acceptance checks, one function per criterion, shared by the CLI and the
//! `acceptance` test target.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arena::{play, Transcript};
use crate::constructibility::{
    dismantle, dominators, order_exists_with_prefix, search_hom, validate, Certificate, CertificateJson, HomSearch,
};
use crate::enumerate::{labeled_connected, mask_graph, MAX_ORDER};
use crate::error::Result;
use crate::families::chain::omega1;
use crate::families::gee::stage_graph;
use crate::families::hgraph::{height, hive_order, hive_tower, nested_height};
use crate::families::{k, make_graph, two_k, GeeOracle, GeeVertex, HGraph, Role};
use crate::graph::{basic, FiniteGraph, GraphBuilder, VertexId};
use crate::oracle::{CertifiedGraph, NeighborOracle};
use crate::runner::{replay_from_spec, simulate, Arena, GEE_COPS, H_COPS};
use crate::solver::{optimal_playout, solve, GameSolution, SolutionJson};
use crate::strategies::{ChainScriptCop, RandomWalker, SolverRobber, TrailCop};

/// Wall-clock limit for the small-graph equivalence sweep.
pub const EQUIVALENCE_LIMIT: Duration = Duration::from_secs(120);
/// Time allowed for the exhaustive homomorphism search on two_k.
pub const HOM_SEARCH_LIMIT: Duration = Duration::from_secs(60);
/// Returns to 0̂ that count as repeated escape on 𝒢.
pub const GEE_MIN_RETURNS: u64 = 5;
/// Lower bound on the spine distance of order-1 hive-type vertices.
pub const H_SPINE_GAP: u32 = 8;

pub const CRITERIA: [(u8, &str); 10] = [
    (1, "dismantlable iff cop-win on all connected graphs up to 6 vertices"),
    (2, "properties of K"),
    (3, "no domination map of two_k is a homomorphism"),
    (4, "scripted chase on hubbed K chains"),
    (5, "prefix obstruction on the two-block omega1 surrogate"),
    (6, "trail cop on random constructible graphs"),
    (7, "path product over C4 and its forbidden top layer"),
    (8, "gee stage alternation and robber survival"),
    (9, "hgraph distances and robber survival"),
    (10, "replay and JSON round trips"),
];

/// Run sizes; `quick` trims seeds and horizons for the staged robbers and
/// the random-graph sweep.
#[derive(Clone, Copy, Debug)]
pub struct SuiteConfig {
    pub trail_graphs: u64,
    pub trail_max_order: usize,
    pub gee_turns: u64,
    pub gee_seeds: u64,
    pub h_turns: u64,
    pub h_seeds: u64,
}

impl SuiteConfig {
    pub fn full() -> Self {
        Self { trail_graphs: 200, trail_max_order: 25, gee_turns: 100_000, gee_seeds: 20, h_turns: 10_000, h_seeds: 20 }
    }

    pub fn quick() -> Self {
        Self { trail_graphs: 50, trail_max_order: 25, gee_turns: 5_000, gee_seeds: 3, h_turns: 2_000, h_seeds: 3 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub title: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion {:>2} {} | {} | {:.1}s | {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.title,
            self.seconds,
            self.detail
        )
    }
}

/// Collects failed checks with a short reason each.
#[derive(Default)]
struct Checks {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Checks {
    fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    fn finish(self) -> (bool, String) {
        let passed = self.failures.is_empty();
        let mut parts = self.notes;
        if !passed {
            let shown: Vec<_> = self.failures.iter().take(5).cloned().collect();
            parts.push(format!("{} failed: {}", self.failures.len(), shown.join("; ")));
        }
        (passed, parts.join(", "))
    }
}

pub fn run(id: u8, cfg: &SuiteConfig) -> CriterionResult {
    let start = Instant::now();
    let mut c = Checks::default();
    let outcome = match id {
        1 => equivalence(&mut c),
        2 => k_properties(&mut c),
        3 => no_homomorphism(&mut c),
        4 => chain_chase(&mut c),
        5 => omega_prefix(&mut c),
        6 => trail_bound(&mut c, cfg),
        7 => product_closure(&mut c),
        8 => gee_survival(&mut c, cfg),
        9 => h_survival(&mut c, cfg),
        10 => reproducibility(&mut c),
        _ => {
            c.check(false, format!("no criterion {id}"));
            Ok(())
        }
    };
    if let Err(e) = outcome {
        c.check(false, format!("error: {e}"));
    }
    let title = CRITERIA.iter().find(|(i, _)| *i == id).map_or("unknown", |(_, t)| t).to_string();
    let (passed, detail) = c.finish();
    CriterionResult { id, title, passed, detail, seconds: start.elapsed().as_secs_f64() }
}

/// Every criterion, each on its own thread.
pub fn run_all(cfg: &SuiteConfig) -> Vec<CriterionResult> {
    std::thread::scope(|s| {
        let handles: Vec<_> = CRITERIA.iter().map(|&(id, _)| s.spawn(move || run(id, cfg))).collect();
        handles.into_iter().map(|h| h.join().expect("criterion thread panicked")).collect()
    })
}

fn equivalence(c: &mut Checks) -> Result<()> {
    let start = Instant::now();
    let (mut total, mut copwin) = (0usize, 0usize);
    for n in 1..=MAX_ORDER {
        for mask in labeled_connected(n) {
            let g = mask_graph(n, mask);
            let d = dismantle(&g)?.is_constructible();
            let s = solve(&g, &[])?.copwin;
            c.check(d == s, format!("n={n} mask={mask}: dismantlable={d} copwin={s}"));
            total += 1;
            copwin += usize::from(s);
        }
    }
    let took = start.elapsed();
    c.check(took < EQUIVALENCE_LIMIT, format!("took {took:?}"));
    c.note(format!("{total} labeled graphs, {copwin} cop-win"));
    Ok(())
}

/// Capture vertices reachable when the cop follows its policy and the
/// robber picks any value-maximizing reply.
fn optimal_capture_vertices(sol: &GameSolution, g: &FiniteGraph) -> Result<BTreeSet<VertexId>> {
    let c0 = sol.cop_start;
    let best = (0..g.n()).filter_map(|r| sol.cop_to_move_value(c0, r)).max();
    let mut stack: Vec<(VertexId, VertexId)> =
        (0..g.n()).filter(|&r| sol.cop_to_move_value(c0, r) == best).map(|r| (c0, r)).collect();
    let mut seen = HashSet::new();
    let mut out = BTreeSet::new();
    while let Some((c, r)) = stack.pop() {
        if !seen.insert((c, r)) {
            continue;
        }
        if c == r {
            out.insert(c);
            continue;
        }
        let c2 = sol.cop_move(c, r)?;
        if c2 == r {
            out.insert(r);
            continue;
        }
        let mut replies = g.neighbors(r).to_vec();
        replies.push(r);
        let value = |w: VertexId| if w == c2 { Some(0) } else { sol.cop_to_move_value(c2, w) };
        let top = replies.iter().map(|&w| value(w)).max().flatten();
        stack.extend(replies.into_iter().filter(|&w| value(w) == top).map(|w| (c2, w)));
    }
    Ok(out)
}

fn k_properties(c: &mut Checks) -> Result<()> {
    let g = k();
    let id = |r: Role| r as VertexId;
    let (x, y, z, zp, t, tp, w) = (id(Role::X), id(Role::Y), id(Role::Z), id(Role::Zp), id(Role::T), id(Role::Tp), id(Role::W));
    c.check(g.n() == 7 && g.edge_count() == 14, format!("{} vertices, {} edges", g.n(), g.edge_count()));
    let dominated: Vec<_> = (0..7).filter(|&v| !dominators(&g, v).unwrap_or_default().is_empty()).collect();
    c.check(dominated == vec![x], format!("dominated vertices {dominated:?}"));
    c.check(dominators(&g, x)? == vec![y], "x's dominators are not exactly {y}");
    let set = |v: &[VertexId]| v.iter().copied().collect::<BTreeSet<_>>();
    c.check(set(g.neighbors(x)) == set(&[y, t, tp]), "N(x) is not {y,t,t'}");
    c.check(set(g.neighbors(w)) == set(&[t, z, tp, zp]), "N(w) is not {t,z,t',z'}");
    let not_y: Vec<_> = (0..7).filter(|&v| v != y && !g.is_adjacent(y, v)).collect();
    c.check(not_y == vec![w], format!("y misses {not_y:?}"));

    // Removing x, then t and t' (under z and z'), leaves z dominating everything.
    let (g1, map1) = g.without(x)?;
    let local = |map: &[VertexId], v: VertexId| map.iter().position(|&u| u == v).expect("kept");
    c.check(g1.dominates(local(&map1, z), local(&map1, t))?, "t not dominated by z after x");
    c.check(g1.dominates(local(&map1, zp), local(&map1, tp))?, "t' not dominated by z' after x");
    let keep: Vec<_> = [y, z, zp, w].to_vec();
    let (g2, _) = g.induced(&keep)?;
    c.check((0..4).all(|v| g2.is_near(1, v)), "z does not reach every remaining vertex");
    let order = vec![z, y, zp, w, tp, t, x];
    let parents = BTreeMap::from([(y, z), (zp, z), (w, z), (tp, zp), (t, z), (x, y)]);
    c.check(validate(&g, &Certificate { order, parents }).is_ok(), "stated dismantling sequence rejected");

    let sol = solve(&g, &[])?;
    c.check(sol.copwin, "K is not cop-win");
    let capture = optimal_playout(&sol, 100)?.map(|(v, _)| v);
    c.check(capture == Some(x), format!("optimal playout captures at {capture:?}"));
    let all: Vec<_> = optimal_capture_vertices(&sol, &g)?.into_iter().map(|v| g.label(v).to_string()).collect();
    c.note(format!("capture time {:?}, tied robber lines end at {all:?}", sol.capture_time));
    Ok(())
}

fn no_homomorphism(c: &mut Checks) -> Result<()> {
    let start = Instant::now();
    let r = search_hom(&two_k(), HOM_SEARCH_LIMIT)?;
    let took = start.elapsed();
    c.check(r == HomSearch::None, format!("two_k search gave {:?}", std::mem::discriminant(&r)));
    c.check(took < HOM_SEARCH_LIMIT, format!("search took {took:?}"));
    for g in [basic::cycle(3), basic::path(2), basic::path(5)] {
        let found = matches!(search_hom(&g, HOM_SEARCH_LIMIT)?, HomSearch::Found(_));
        c.check(found, format!("no witness on {}", g.name()));
    }
    c.note(format!("two_k exhausted in {:.2}s", took.as_secs_f64()));
    Ok(())
}

fn chain_chase(c: &mut Checks) -> Result<()> {
    let mut claims = 0;
    for blocks in [2, 3, 4] {
        let g = make_graph(&format!("kchain?blocks={blocks}&hub=true"))?;
        let sol = std::sync::Arc::new(solve(&g, &[])?);
        c.check(sol.copwin, format!("blocks={blocks}: not cop-win"));
        let t = play(&g, &mut ChainScriptCop::new(), &mut SolverRobber { solution: sol }, 10 * g.n() as u64, 0);
        c.check(t.captured(), format!("blocks={blocks}: no capture"));
        c.check(t.summary.violations.is_empty(), format!("blocks={blocks}: {:?}", t.summary.violations));
        c.check(t.summary.claims_checked > 0, format!("blocks={blocks}: no scripted claims"));
        c.check(t.summary.claims_failed == 0, format!("blocks={blocks}: {} claims failed", t.summary.claims_failed));
        claims += t.summary.claims_checked;
    }
    c.note(format!("{claims} forced-reply claims checked"));
    Ok(())
}

fn omega_prefix(c: &mut Checks) -> Result<()> {
    let o = omega1("omega1?blocks=2", 2)?;
    let k1 = o.blocks[0].all();
    let k2 = o.blocks[1].all();
    let blocked: Vec<_> = std::iter::once(o.a).chain(k1).chain([o.b]).collect();
    c.check(!order_exists_with_prefix(&o.graph, &blocked)?, "{A} ∪ K1 ∪ {B} extends to an order");
    let open: Vec<_> = std::iter::once(o.a).chain(k1).chain(k2).collect();
    c.check(order_exists_with_prefix(&o.graph, &open)?, "{A} ∪ K1 ∪ K2 does not extend");
    c.check(dominators(&o.graph, o.b)?.contains(&o.a), "B is not dominated by A");
    Ok(())
}

/// Random constructible graph: each new vertex joins a random parent and a
/// random part of the parent's neighborhood. Returns the graph with the
/// construction it was built by.
pub fn random_constructible(n: usize, seed: u64) -> (FiniteGraph, Certificate) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut adj: Vec<BTreeSet<VertexId>> = vec![BTreeSet::new()];
    let mut parents = BTreeMap::new();
    for v in 1..n {
        let p = rng.gen_range(0..v);
        let mut nbrs: BTreeSet<_> = adj[p].iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
        nbrs.insert(p);
        for &u in &nbrs {
            adj[u].insert(v);
        }
        adj.push(nbrs);
        parents.insert(v, p);
    }
    let mut b = GraphBuilder::new(format!("random-constructible-{n}-{seed}"));
    for v in 0..n {
        b.add_vertex(format!("v{v}"));
    }
    for (v, list) in adj.iter().enumerate() {
        for &u in list {
            if u < v {
                b.add_edge(u, v);
            }
        }
    }
    (b.build().expect("valid"), Certificate { order: (0..n).collect(), parents })
}

fn trail_bound(c: &mut Checks, cfg: &SuiteConfig) -> Result<()> {
    let mut longest = 0;
    for seed in 0..cfg.trail_graphs {
        let n = 2 + (seed as usize * 7919) % (cfg.trail_max_order - 1);
        let (g, cert) = random_constructible(n, seed);
        c.check(validate(&g, &cert).is_ok(), format!("seed {seed}: generator certificate invalid"));
        c.check(dismantle(&g)?.is_constructible(), format!("seed {seed}: dismantling failed"));
        let horizon = (n * n + 2 * n) as u64;
        let cg = CertifiedGraph::new(g, &cert)?;
        let t = play(&cg, &mut TrailCop::new(), &mut RandomWalker::default(), horizon, seed);
        c.check(t.is_legal(), format!("seed {seed}: {:?}", t.summary.outcome));
        c.check(t.captured(), format!("seed {seed}: no capture within {horizon}"));
        c.check(t.summary.violations.is_empty(), format!("seed {seed}: {:?}", t.summary.violations));
        longest = longest.max(t.capture_turn().unwrap_or(0));
    }
    c.note(format!("{} graphs, longest chase {longest} rounds", cfg.trail_graphs));
    Ok(())
}

fn product_closure(c: &mut Checks) -> Result<()> {
    for n in [3, 6] {
        let g = make_graph(&format!("ppath?base={{cycle?n=4}}&n={n}"))?;
        c.check(dismantle(&g)?.is_constructible(), format!("n={n}: not constructible"));
        c.check(solve(&g, &[])?.copwin, format!("n={n}: not cop-win"));
    }
    let g = make_graph("ppath?base={cycle?n=4}&n=3")?;
    let top: Vec<_> = (12..16).collect();
    let top_labels: Vec<_> = top.iter().map(|&v| g.label(v).to_string()).collect();
    c.check(top_labels.iter().all(|l| l.ends_with(",3)")), format!("top layer labels {top_labels:?}"));
    c.check(!solve(&g, &top)?.copwin, "n=3 with the top layer forbidden is still cop-win");
    Ok(())
}

/// Robber cycle commitments and arrivals at 0̂ recorded in a transcript.
pub fn gee_robber_profile(t: &Transcript) -> (BTreeSet<String>, u64) {
    let origin = GeeOracle.key(&GeeVertex::origin());
    let mut cycles = BTreeSet::new();
    let mut returns = 0;
    let mut prev: Option<&str> = None;
    for e in t.events.iter().filter(|e| e.actor == crate::arena::Actor::Robber) {
        if let Some(m) = e.note.as_deref().and_then(|n| n.split_whitespace().find_map(|p| p.strip_prefix("m="))) {
            cycles.insert(m.to_string());
        }
        if e.key == origin && prev.is_some_and(|p| p != origin) {
            returns += 1;
        }
        prev = Some(&e.key);
    }
    (cycles, returns)
}

fn survival(c: &mut Checks, t: &Transcript, what: &str) {
    c.check(t.is_legal(), format!("{what}: {:?}", t.summary.outcome));
    c.check(!t.captured(), format!("{what}: captured at {:?}", t.capture_turn()));
    c.check(!t.summary.contaminated, format!("{what}: fallback moves"));
    c.check(t.summary.violations.is_empty(), format!("{what}: {:?}", t.summary.violations.first()));
}

fn gee_survival(c: &mut Checks, cfg: &SuiteConfig) -> Result<()> {
    let verdicts: Vec<bool> =
        (1..=4).map(|s| stage_graph("gee", s).and_then(|(g, _)| dismantle(&g)).map(|d| d.is_constructible())).collect::<Result<_>>()?;
    c.check(verdicts == [false, true, false, true], format!("stage verdicts {verdicts:?}"));
    let arena = Arena::Gee(GeeOracle);
    let (mut confined, mut returning) = (0, 0);
    for cop in GEE_COPS {
        for seed in 0..cfg.gee_seeds {
            let t = simulate(&arena, cop, "gee", cfg.gee_turns, seed)?;
            let what = format!("{cop} seed {seed}");
            survival(c, &t, &what);
            let (cycles, returns) = gee_robber_profile(&t);
            if returns == 0 && cycles.len() == 1 {
                confined += 1;
            } else if returns >= GEE_MIN_RETURNS {
                returning += 1;
            } else {
                c.check(false, format!("{what}: {returns} returns over cycles {cycles:?}"));
            }
        }
    }
    c.note(format!("{confined} confined and {returning} returning runs of {} turns", cfg.gee_turns));
    Ok(())
}

fn h_survival(c: &mut Checks, cfg: &SuiteConfig) -> Result<()> {
    for m in [1, 2] {
        let (g, o, hv) = hive_tower(m);
        let hv = hv.expect("m > 0");
        let d = g.bfs(&[o])[hv];
        c.check(d == Some(height(m) as usize + 1), format!("G_{m}: distance {d:?}"));
    }
    let h = HGraph::new();
    let mut order_one = 0;
    for v in h.truncation_vertices(2) {
        for w in h.neighbors(&v) {
            c.check(nested_height(&v.g).abs_diff(nested_height(&w.g)) <= 1, format!("height jumps on {v} {w}"));
        }
        if hive_order(&v) == Some(1) {
            order_one += 1;
            c.check(nested_height(&v.g) >= H_SPINE_GAP, format!("{v} may be within {H_SPINE_GAP} of the spine"));
        }
    }
    c.check(order_one > 0, "no order-1 hive-type vertices found");
    let arena = Arena::H(h);
    for cop in H_COPS {
        for seed in 0..cfg.h_seeds {
            let t = simulate(&arena, cop, "hgraph", cfg.h_turns, seed)?;
            survival(c, &t, &format!("{cop} seed {seed}"));
        }
    }
    c.note(format!("{order_one} order-1 hive-type vertices, {} runs of {} turns", 3 * cfg.h_seeds, cfg.h_turns));
    Ok(())
}

fn reproducibility(c: &mut Checks) -> Result<()> {
    let runs = [
        ("K", "solver", "k-escape", 50),
        ("two_k", "trail", "random", 200),
        ("kchain?blocks=3&hub=true", "chain-script", "solver", 200),
        ("cycle?n=5", "shortest-path?budget=8", "shadow", 100),
        ("gee", "climb?chase=8", "gee", 500),
        ("hgraph", "hive-climb?chase=4&top=2", "hgraph", 300),
        ("kchain", "consistent", "random", 100),
    ];
    for (g, cop, robber, horizon) in runs {
        let what = format!("{g} {cop} vs {robber}");
        let t = simulate(&Arena::from_spec(g)?, cop, robber, horizon, 11)?;
        let text = t.to_jsonl();
        c.check(Transcript::from_jsonl_str(&text)? == t, format!("{what}: transcript round trip"));
        c.check(replay_from_spec(&t.header)?.to_jsonl() == text, format!("{what}: replay differs"));
    }
    for spec in ["K", "two_k", "omega1?blocks=2", "ppath?base={cycle?n=4}&n=3", "gee?stage=2", "hgraph?levels=1"] {
        let g = make_graph(spec)?;
        let back = FiniteGraph::from_json_str(&g.to_json_string())?;
        c.check(back.to_json() == g.to_json(), format!("{spec}: graph round trip"));
        if let Some(cert) = dismantle(&g)?.certificate() {
            let doc: CertificateJson = serde_json::from_str(&serde_json::to_string(&cert.to_json(&g))?)?;
            c.check(Certificate::from_json(&g, &doc)? == *cert, format!("{spec}: certificate round trip"));
        }
        if g.n() <= 40 {
            let sol = solve(&g, &[])?.to_json(&g, true);
            let back: SolutionJson = serde_json::from_str(&serde_json::to_string(&sol)?)?;
            c.check(back == sol, format!("{spec}: solution round trip"));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_constructible_is_certified() {
        for seed in 0..20 {
            let (g, cert) = random_constructible(12, seed);
            assert!(g.is_connected());
            assert!(validate(&g, &cert).is_ok());
        }
    }

    #[test]
    fn cheap_criteria_pass() {
        for id in [2, 5, 7] {
            let r = run(id, &SuiteConfig::quick());
            assert!(r.passed, "{r}");
        }
    }
}
