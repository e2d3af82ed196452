//! The layered union graph ℋ built from iterated hive graphs.
//!
//! `G_0` is a single vertex. `H_n` is `G_{n-1}` with a new 4-cycle glued at
//! its origin, and `G_n` is the hive graph of `H_n` of height `l_n = 2n + 5`.
//! ℋ has a vertex `(n, x)` for every `x ∈ G_n`, and `(n, x) ~ (n', x')` when
//! `|n - n'| ≤ 1` and `x ∼ x'` inside the larger of the two graphs.
//!
//! Addresses are recursive: an element of `G_n` is the hive vertex, or a pair
//! of an `H_n` element and a height. An `H_n` element is an embedded `G_{n-1}`
//! element or one of the three new cycle vertices. The embedding of `G_{n-1}`
//! into `G_n` is `u ↦ PAIR(u, 0)`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, RwLock};

use rand::{Rng, RngCore};

use crate::error::{Error, Result};
use crate::graph::{FiniteGraph, GraphBuilder, VertexId};
use crate::oracle::{materialize_set, Materialized, NeighborOracle};

use super::product::hive;

/// Largest truncation `make` will materialize.
pub const MAX_LEVELS: u32 = 3;

/// Hive height used at level `n`.
pub fn height(n: u32) -> u32 {
    2 * n + 5
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GVertex {
    Origin,
    Hive(u32),
    Pair(Box<HBase>, u32),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HBase {
    Embedded(GVertex),
    Cyc(u8),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HVertex {
    pub level: u32,
    pub g: GVertex,
}

impl HVertex {
    pub fn new(level: u32, g: GVertex) -> Self {
        Self { level, g }
    }

    pub fn origin_at(level: u32) -> Self {
        Self::new(level, origin(level))
    }

    pub fn is_spine(&self) -> bool {
        is_origin(&self.g, self.level)
    }
}

impl fmt::Display for GVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GVertex::Origin => write!(f, "ORIGIN"),
            GVertex::Hive(k) => write!(f, "HIVE({k})"),
            GVertex::Pair(b, i) => write!(f, "PAIR({b},{i})"),
        }
    }
}

impl fmt::Display for HBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HBase::Embedded(g) => write!(f, "{g}"),
            HBase::Cyc(i) => write!(f, "CYC({i})"),
        }
    }
}

impl fmt::Display for HVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.level, self.g)
    }
}

pub fn pair(h: HBase, i: u32) -> GVertex {
    GVertex::Pair(Box::new(h), i)
}

pub fn embed(g: GVertex) -> GVertex {
    pair(HBase::Embedded(g), 0)
}

/// Embeds an element of `G_from` into `G_to` for `from ≤ to`.
pub fn embed_to(mut g: GVertex, from: u32, to: u32) -> GVertex {
    for _ in from..to {
        g = embed(g);
    }
    g
}

/// The origin of `G_n`.
pub fn origin(n: u32) -> GVertex {
    embed_to(GVertex::Origin, 0, n)
}

pub fn is_origin(g: &GVertex, n: u32) -> bool {
    match g {
        GVertex::Origin => n == 0,
        GVertex::Pair(b, 0) if n > 0 => matches!(&**b, HBase::Embedded(inner) if is_origin(inner, n - 1)),
        _ => false,
    }
}

/// Largest height coordinate anywhere in the nested address of `g`, with the
/// hive vertex of `G_n` counting as `l_n + 1`. Changes by at most one along
/// every edge of ℋ and vanishes on the spine, so it bounds the distance to
/// the spine from below.
pub fn nested_height(g: &GVertex) -> u32 {
    match g {
        GVertex::Origin => 0,
        GVertex::Hive(n) => height(*n) + 1,
        GVertex::Pair(b, i) => match &**b {
            HBase::Embedded(x) => (*i).max(nested_height(x)),
            HBase::Cyc(_) => *i,
        },
    }
}

pub fn is_valid(g: &GVertex, n: u32) -> bool {
    match g {
        GVertex::Origin => n == 0,
        GVertex::Hive(k) => *k == n && n > 0,
        GVertex::Pair(b, i) => {
            n > 0
                && *i <= height(n)
                && match &**b {
                    HBase::Embedded(inner) => is_valid(inner, n - 1),
                    HBase::Cyc(c) => (1..=3).contains(c),
                }
        }
    }
}

/// Adjacent-or-equal inside `G_n`.
pub fn g_near(a: &GVertex, b: &GVertex, n: u32) -> bool {
    match (a, b) {
        (GVertex::Origin, GVertex::Origin) => n == 0,
        (GVertex::Hive(k), GVertex::Hive(k2)) => k == k2,
        (GVertex::Hive(_), GVertex::Pair(_, i)) | (GVertex::Pair(_, i), GVertex::Hive(_)) => *i == height(n),
        (GVertex::Pair(h1, i), GVertex::Pair(h2, j)) => i.abs_diff(*j) <= 1 && h_near(h1, h2, n),
        _ => false,
    }
}

/// Adjacent-or-equal inside `H_n`.
pub fn h_near(a: &HBase, b: &HBase, n: u32) -> bool {
    match (a, b) {
        (HBase::Embedded(g1), HBase::Embedded(g2)) => g_near(g1, g2, n - 1),
        (HBase::Cyc(i), HBase::Cyc(j)) => i.abs_diff(*j) <= 1,
        (HBase::Cyc(i), HBase::Embedded(g)) | (HBase::Embedded(g), HBase::Cyc(i)) => {
            (*i == 1 || *i == 3) && is_origin(g, n - 1)
        }
    }
}

/// Projection of `G_n` minus its hive vertex onto `H_n`.
pub fn hive_map(g: &GVertex) -> Option<HBase> {
    match g {
        GVertex::Pair(b, _) => Some((**b).clone()),
        _ => None,
    }
}

/// One-step projection `G_n ∖ {v_n} → G_{n-1}`: the hive map, then the new
/// cycle collapsed onto the origin.
pub fn one_step(g: &GVertex, n: u32) -> Option<GVertex> {
    match hive_map(g)? {
        HBase::Embedded(inner) => Some(inner),
        HBase::Cyc(_) => Some(origin(n - 1)),
    }
}

/// Value of the n-projection `J_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum JImage {
    InG(GVertex),
    HiveAbove(u32),
}

pub fn j(v: &HVertex, n: u32) -> JImage {
    let (mut m, mut x) = (v.level, v.g.clone());
    loop {
        if m <= n {
            return JImage::InG(embed_to(x, m, n));
        }
        if let GVertex::Hive(k) = x {
            return JImage::HiveAbove(k);
        }
        x = one_step(&x, m).expect("non-hive vertices project");
        m -= 1;
    }
}

/// Value of `J'_n`, the n-projection followed by the hive map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum JPrime {
    InH(HBase),
    Hive(u32),
}

pub fn j_prime(v: &HVertex, n: u32) -> Result<JPrime> {
    if n == 0 {
        return Err(Error::InvalidArgument("J' needs n ≥ 1".into()));
    }
    Ok(match j(v, n) {
        JImage::HiveAbove(k) => JPrime::Hive(k),
        JImage::InG(GVertex::Hive(k)) => JPrime::Hive(k),
        JImage::InG(g) => JPrime::InH(hive_map(&g).expect("pair address")),
    })
}

/// The `n` with `J_n(v) = v_n`, if any.
pub fn hive_order(v: &HVertex) -> Option<u32> {
    let (mut m, mut x) = (v.level, v.g.clone());
    loop {
        if let GVertex::Hive(k) = x {
            return Some(k);
        }
        if m == 0 {
            return None;
        }
        x = one_step(&x, m).expect("non-hive vertices project");
        m -= 1;
    }
}

/// Everything the projection maps say about one vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Projections {
    pub hive_map: Option<HBase>,
    pub one_step: Option<GVertex>,
    pub j: JImage,
    pub j_prime: Option<JPrime>,
    pub hive_order: Option<u32>,
}

pub fn projections(v: &HVertex, n: u32) -> Projections {
    Projections {
        hive_map: hive_map(&v.g),
        one_step: if v.level == 0 { None } else { one_step(&v.g, v.level) },
        j: j(v, n),
        j_prime: j_prime(v, n).ok(),
        hive_order: hive_order(v),
    }
}

/// Distance in `H_n` between an `H_n` element and a cycle vertex of the
/// cycle first added in `H_m`, for `m ≤ n`, measured through the embedding.
/// Only used with `n = m`, where it is the cycle distance to the element's
/// cycle position.
pub fn cycle_position(h: &HBase, n: u32) -> Option<u8> {
    match h {
        HBase::Cyc(i) => Some(*i),
        HBase::Embedded(g) if is_origin(g, n - 1) => Some(0),
        _ => None,
    }
}

fn parse_g(s: &str) -> Option<(GVertex, &str)> {
    if let Some(rest) = s.strip_prefix("ORIGIN") {
        return Some((GVertex::Origin, rest));
    }
    if let Some(rest) = s.strip_prefix("HIVE(") {
        let close = rest.find(')')?;
        let k = rest[..close].parse().ok()?;
        return Some((GVertex::Hive(k), &rest[close + 1..]));
    }
    let rest = s.strip_prefix("PAIR(")?;
    let (base, rest) = if let Some(r) = rest.strip_prefix("CYC(") {
        let close = r.find(')')?;
        (HBase::Cyc(r[..close].parse().ok()?), &r[close + 1..])
    } else {
        let (g, r) = parse_g(rest)?;
        (HBase::Embedded(g), r)
    };
    let rest = rest.strip_prefix(',')?;
    let close = rest.find(')')?;
    let i = rest[..close].parse().ok()?;
    Some((pair(base, i), &rest[close + 1..]))
}

/// Lazy oracle for ℋ; element lists of each `G_n` are cached on demand.
#[derive(Debug, Default)]
pub struct HGraph {
    cache: RwLock<HashMap<u32, Arc<Vec<GVertex>>>>,
}

impl Clone for HGraph {
    fn clone(&self) -> Self {
        let cache = self.cache.read().expect("cache lock").clone();
        Self { cache: RwLock::new(cache) }
    }
}

impl HGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// All elements of `G_n`.
    pub fn all_g(&self, n: u32) -> Arc<Vec<GVertex>> {
        if let Some(v) = self.cache.read().expect("cache lock").get(&n) {
            return v.clone();
        }
        let mut out = Vec::new();
        if n == 0 {
            out.push(GVertex::Origin);
        } else {
            out.push(GVertex::Hive(n));
            for h in self.all_h(n) {
                for i in 0..=height(n) {
                    out.push(pair(h.clone(), i));
                }
            }
        }
        out.sort();
        let out = Arc::new(out);
        self.cache.write().expect("cache lock").insert(n, out.clone());
        out
    }

    /// All elements of `H_n`, `n ≥ 1`.
    pub fn all_h(&self, n: u32) -> Vec<HBase> {
        let mut out: Vec<HBase> = self.all_g(n - 1).iter().cloned().map(HBase::Embedded).collect();
        out.extend((1..=3).map(HBase::Cyc));
        out
    }

    /// Closed neighborhood of `x` inside `G_n`, sorted.
    pub fn g_closed(&self, x: &GVertex, n: u32) -> Vec<GVertex> {
        let mut out = match x {
            GVertex::Origin => vec![GVertex::Origin],
            GVertex::Hive(_) => {
                let top = height(n);
                let mut v: Vec<_> = self.all_h(n).into_iter().map(|h| pair(h, top)).collect();
                v.push(x.clone());
                v
            }
            GVertex::Pair(h, i) => {
                let top = height(n);
                let mut v = Vec::new();
                for h2 in self.h_closed(h, n) {
                    for i2 in i.saturating_sub(1)..=(i + 1).min(top) {
                        v.push(pair(h2.clone(), i2));
                    }
                }
                if *i == top {
                    v.push(GVertex::Hive(n));
                }
                v
            }
        };
        out.sort();
        out.dedup();
        out
    }

    /// Closed neighborhood of `h` inside `H_n`.
    pub fn h_closed(&self, h: &HBase, n: u32) -> Vec<HBase> {
        match h {
            HBase::Embedded(g) => {
                let mut v: Vec<_> = self.g_closed(g, n - 1).into_iter().map(HBase::Embedded).collect();
                if is_origin(g, n - 1) {
                    v.push(HBase::Cyc(1));
                    v.push(HBase::Cyc(3));
                }
                v
            }
            HBase::Cyc(i) => {
                let mut v = vec![HBase::Cyc(*i)];
                if *i > 1 {
                    v.push(HBase::Cyc(i - 1));
                }
                if *i < 3 {
                    v.push(HBase::Cyc(i + 1));
                }
                if *i == 1 || *i == 3 {
                    v.push(HBase::Embedded(origin(n - 1)));
                }
                v
            }
        }
    }

    /// The level-`n` layer as a finite graph, from the oracle's own rules.
    pub fn level_graph(&self, n: u32) -> Result<Materialized<HVertex>> {
        let verts = self.all_g(n).iter().map(|g| HVertex::new(n, g.clone())).collect();
        materialize_set(self, verts)
    }

    /// Every vertex on levels `0..=levels`.
    pub fn truncation_vertices(&self, levels: u32) -> Vec<HVertex> {
        (0..=levels).flat_map(|m| self.all_g(m).iter().map(move |g| HVertex::new(m, g.clone())).collect::<Vec<_>>()).collect()
    }

    /// Distance from `v` to the spine, capped at `cap`.
    pub fn distance_to_spine(&self, v: &HVertex, cap: usize, budget: usize) -> Result<crate::graph::Distance> {
        crate::oracle::distance_to(self, v, HVertex::is_spine, cap, budget)
    }
}

impl NeighborOracle for HGraph {
    type Vertex = HVertex;

    fn spec(&self) -> String {
        "hgraph".to_string()
    }

    fn key(&self, v: &HVertex) -> String {
        v.to_string()
    }

    fn parse_key(&self, key: &str) -> Result<HVertex> {
        let bad = || Error::UnknownVertex(key.to_string());
        let inner = key.strip_prefix('(').and_then(|s| s.strip_suffix(')')).ok_or_else(bad)?;
        let (level, addr) = inner.split_once(',').ok_or_else(bad)?;
        let level: u32 = level.parse().map_err(|_| bad())?;
        let (g, rest) = parse_g(addr).ok_or_else(bad)?;
        let v = HVertex::new(level, g);
        if !rest.is_empty() || !self.contains(&v) {
            return Err(bad());
        }
        Ok(v)
    }

    fn contains(&self, v: &HVertex) -> bool {
        is_valid(&v.g, v.level)
    }

    fn neighbors(&self, v: &HVertex) -> Vec<HVertex> {
        let n = v.level;
        let mut out: BTreeSet<HVertex> = BTreeSet::new();
        out.extend(self.g_closed(&v.g, n).into_iter().map(|g| HVertex::new(n, g)));
        out.extend(self.g_closed(&embed(v.g.clone()), n + 1).into_iter().map(|g| HVertex::new(n + 1, g)));
        if let GVertex::Pair(b, i) = &v.g {
            if *i <= 1 {
                match &**b {
                    HBase::Embedded(g) => {
                        out.extend(self.g_closed(g, n - 1).into_iter().map(|g| HVertex::new(n - 1, g)));
                    }
                    HBase::Cyc(1 | 3) => {
                        out.insert(HVertex::origin_at(n - 1));
                    }
                    HBase::Cyc(_) => {}
                }
            }
        }
        out.remove(v);
        out.into_iter().collect()
    }

    fn is_adjacent(&self, u: &HVertex, v: &HVertex) -> bool {
        if u == v {
            return false;
        }
        let (lo, hi) = if u.level <= v.level { (u, v) } else { (v, u) };
        match hi.level - lo.level {
            0 => g_near(&lo.g, &hi.g, lo.level),
            1 => g_near(&embed(lo.g.clone()), &hi.g, hi.level),
            _ => false,
        }
    }

    fn potential(&self, v: &HVertex) -> Option<i64> {
        Some(i64::from(v.level))
    }

    fn distance_hint(&self, u: &HVertex, v: &HVertex) -> u64 {
        let h = |x: &HVertex| match &x.g {
            GVertex::Pair(_, i) => u64::from(*i),
            GVertex::Hive(k) => u64::from(height(*k) + 1),
            GVertex::Origin => 0,
        };
        u64::from(u.level.abs_diff(v.level)) + h(u).abs_diff(h(v))
    }

    fn default_vertex(&self) -> HVertex {
        HVertex::origin_at(0)
    }

    fn sample_vertex(&self, rng: &mut dyn RngCore) -> HVertex {
        let level = rng.gen_range(0..=2);
        let all = self.all_g(level);
        HVertex::new(level, all[rng.gen_range(0..all.len())].clone())
    }
}

/// `G_n` built directly with the hive construction; returns the graph, the
/// id of its origin and the id of its hive vertex (none for `n = 0`).
pub fn hive_tower(n: u32) -> (FiniteGraph, VertexId, Option<VertexId>) {
    if n == 0 {
        let g = FiniteGraph::from_edges("G0", vec!["ORIGIN".into()], []).expect("single vertex");
        return (g, 0, None);
    }
    let (prev, o, _) = hive_tower(n - 1);
    let mut b = GraphBuilder::new(format!("H{n}"));
    for l in prev.labels() {
        b.add_vertex(l.clone());
    }
    for (u, v) in prev.edges() {
        b.add_edge(u, v);
    }
    let c: Vec<_> = (1..=3).map(|i| b.add_vertex(format!("CYC({i})"))).collect();
    b.add_edge(o, c[0]);
    b.add_edge(c[0], c[1]);
    b.add_edge(c[1], c[2]);
    b.add_edge(c[2], o);
    let h = b.build().expect("H_n is valid");
    let hv = hive(&format!("G{n}"), &h, height(n) as usize);
    (hv.graph.clone(), hv.id(o, 0), Some(hv.hive))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::symmetry_violations;

    #[test]
    fn level_sizes() {
        let h = HGraph::new();
        assert_eq!(h.all_g(1).len(), 33);
        assert_eq!(h.all_g(2).len(), 361);
        assert_eq!(hive_tower(1).0.n(), 33);
        assert_eq!(hive_tower(2).0.n(), 361);
    }

    #[test]
    fn nested_height_is_lipschitz() {
        let h = HGraph::new();
        for u in h.truncation_vertices(2) {
            if u.is_spine() {
                assert_eq!(nested_height(&u.g), 0);
            }
            for w in h.neighbors(&u) {
                assert!(nested_height(&u.g).abs_diff(nested_height(&w.g)) <= 1, "{u} {w}");
            }
        }
        assert_eq!(nested_height(&GVertex::Hive(2)), height(2) + 1);
    }

    #[test]
    fn keys_round_trip() {
        let h = HGraph::new();
        for v in h.truncation_vertices(2) {
            assert_eq!(h.parse_key(&h.key(&v)).unwrap(), v);
        }
        assert_eq!(h.key(&HVertex::origin_at(2)), "(2,PAIR(PAIR(ORIGIN,0),0))");
        assert!(h.parse_key("(1,ORIGIN)").is_err());
        assert!(h.parse_key("(1,PAIR(CYC(4),0))").is_err());
    }

    #[test]
    fn neighbors_agree_with_adjacency() {
        let h = HGraph::new();
        let sample: Vec<_> = h.truncation_vertices(1);
        assert!(symmetry_violations(&h, &sample).is_empty());
        let lvl1 = h.truncation_vertices(2);
        for u in sample.iter().take(12) {
            for v in &lvl1 {
                assert_eq!(h.is_adjacent(u, v), h.neighbors(u).contains(v), "{u} {v}");
            }
        }
    }

    #[test]
    fn level_graph_matches_hive_tower() {
        let h = HGraph::new();
        for n in 1..=2 {
            let m = h.level_graph(n).unwrap();
            let (g, _, _) = hive_tower(n);
            assert_eq!(m.graph.n(), g.n());
            assert_eq!(m.graph.edge_count(), g.edge_count());
        }
    }

    #[test]
    fn projections_of_spine_and_hive() {
        let s = HVertex::origin_at(3);
        assert_eq!(j_prime(&s, 2).unwrap(), JPrime::InH(HBase::Embedded(origin(1))));
        let v = HVertex::new(2, pair(HBase::Embedded(GVertex::Hive(1)), 4));
        assert_eq!(hive_order(&v), Some(1));
        assert_eq!(j(&v, 1), JImage::InG(GVertex::Hive(1)));
        assert_eq!(j(&v, 0), JImage::HiveAbove(1));
        assert_eq!(hive_order(&HVertex::new(2, GVertex::Hive(2))), Some(2));
        assert_eq!(hive_order(&HVertex::origin_at(2)), None);
        assert_eq!(projections(&HVertex::new(1, GVertex::Hive(1)), 1).hive_map, None);
    }
}
