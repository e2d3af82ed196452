//! Lazy graph interface shared by finite graphs and the infinite families.
//!
//! Every walk over an oracle is bounded by a radius cap and a vertex budget.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt::Debug;
use std::hash::Hash;

use rand::{Rng, RngCore};

use crate::error::{Error, Result};
use crate::graph::{Distance, FiniteGraph, VertexId};

/// Default vertex budget for oracle walks.
pub const DEFAULT_BUDGET: usize = 200_000;

pub trait NeighborOracle {
    type Vertex: Clone + Eq + Ord + Hash + Debug;

    /// Family spec string of the graph this oracle serves.
    fn spec(&self) -> String;

    fn key(&self, v: &Self::Vertex) -> String;

    fn parse_key(&self, key: &str) -> Result<Self::Vertex>;

    fn contains(&self, v: &Self::Vertex) -> bool;

    /// Sorted, never contains `v`. For oracles that are not locally finite
    /// this is a finite symmetric sub-neighborhood documented per family.
    fn neighbors(&self, v: &Self::Vertex) -> Vec<Self::Vertex>;

    fn is_adjacent(&self, u: &Self::Vertex, v: &Self::Vertex) -> bool;

    fn locally_finite(&self) -> bool {
        true
    }

    /// Adjacent or equal.
    fn is_near(&self, u: &Self::Vertex, v: &Self::Vertex) -> bool {
        u == v || self.is_adjacent(u, v)
    }

    fn parent(&self, _v: &Self::Vertex) -> Option<Self::Vertex> {
        None
    }

    fn supports_trails(&self) -> bool {
        false
    }

    /// Earliest position `k` on the trail `v, δ(v), δ²(v), …` whose vertex
    /// lies in `targets`, with that vertex.
    fn trail_hits(
        &self,
        _v: &Self::Vertex,
        _targets: &BTreeSet<Self::Vertex>,
    ) -> Result<Option<(usize, Self::Vertex)>> {
        Err(Error::Unsupported("trail queries"))
    }

    /// Family coordinate used for drift metrics (block index, level, support).
    fn potential(&self, _v: &Self::Vertex) -> Option<i64> {
        None
    }

    /// Cheap distance estimate used by chasers once a bounded search gives up.
    fn distance_hint(&self, _u: &Self::Vertex, _v: &Self::Vertex) -> u64 {
        0
    }

    /// Uniform choice from `N[v]` (the local neighborhood when the oracle is
    /// not locally finite).
    fn random_neighbor(&self, v: &Self::Vertex, rng: &mut dyn RngCore) -> Self::Vertex {
        let mut options = self.neighbors(v);
        let i = rng.gen_range(0..=options.len());
        if i == options.len() {
            v.clone()
        } else {
            options.swap_remove(i)
        }
    }

    fn default_vertex(&self) -> Self::Vertex;

    fn sample_vertex(&self, rng: &mut dyn RngCore) -> Self::Vertex;
}

impl NeighborOracle for FiniteGraph {
    type Vertex = VertexId;

    fn spec(&self) -> String {
        self.name().to_string()
    }

    fn key(&self, v: &VertexId) -> String {
        self.label(*v).to_string()
    }

    fn parse_key(&self, key: &str) -> Result<VertexId> {
        self.id(key)
    }

    fn contains(&self, v: &VertexId) -> bool {
        *v < self.n()
    }

    fn neighbors(&self, v: &VertexId) -> Vec<VertexId> {
        FiniteGraph::neighbors(self, *v).to_vec()
    }

    fn is_adjacent(&self, u: &VertexId, v: &VertexId) -> bool {
        FiniteGraph::is_adjacent(self, *u, *v)
    }

    fn default_vertex(&self) -> VertexId {
        0
    }

    fn sample_vertex(&self, rng: &mut dyn RngCore) -> VertexId {
        rng.gen_range(0..self.n())
    }
}

/// A finite graph together with a construction certificate's parent map,
/// exposed as an oracle with trail support.
#[derive(Clone, Debug)]
pub struct CertifiedGraph {
    pub graph: FiniteGraph,
    parent: Vec<Option<VertexId>>,
    root: VertexId,
}

impl CertifiedGraph {
    pub fn new(graph: FiniteGraph, cert: &crate::constructibility::Certificate) -> Result<Self> {
        crate::constructibility::validate(&graph, cert).into_result()?;
        let mut parent = vec![None; graph.n()];
        for (&c, &p) in &cert.parents {
            parent[c] = Some(p);
        }
        Ok(Self { graph, parent, root: cert.order[0] })
    }

    pub fn root(&self) -> VertexId {
        self.root
    }
}

impl NeighborOracle for CertifiedGraph {
    type Vertex = VertexId;

    fn spec(&self) -> String {
        self.graph.name().to_string()
    }
    fn key(&self, v: &VertexId) -> String {
        self.graph.key(v)
    }
    fn parse_key(&self, key: &str) -> Result<VertexId> {
        self.graph.id(key)
    }
    fn contains(&self, v: &VertexId) -> bool {
        *v < self.graph.n()
    }
    fn neighbors(&self, v: &VertexId) -> Vec<VertexId> {
        self.graph.neighbors(*v).to_vec()
    }
    fn is_adjacent(&self, u: &VertexId, v: &VertexId) -> bool {
        self.graph.is_adjacent(*u, *v)
    }
    fn parent(&self, v: &VertexId) -> Option<VertexId> {
        self.parent[*v]
    }
    fn supports_trails(&self) -> bool {
        true
    }
    fn trail_hits(&self, v: &VertexId, targets: &BTreeSet<VertexId>) -> Result<Option<(usize, VertexId)>> {
        let mut cur = Some(*v);
        let mut k = 0;
        while let Some(u) = cur {
            if targets.contains(&u) {
                return Ok(Some((k, u)));
            }
            cur = self.parent[u];
            k += 1;
        }
        Ok(None)
    }
    fn default_vertex(&self) -> VertexId {
        self.root
    }
    fn sample_vertex(&self, rng: &mut dyn RngCore) -> VertexId {
        self.graph.sample_vertex(rng)
    }
}

/// BFS distances from `sources` up to `cap`, exploring at most `budget`
/// vertices.
pub fn ball<O: NeighborOracle>(
    oracle: &O,
    sources: &[O::Vertex],
    cap: usize,
    budget: usize,
) -> Result<HashMap<O::Vertex, usize>> {
    let mut dist = HashMap::new();
    let mut queue = VecDeque::new();
    for s in sources {
        if dist.insert(s.clone(), 0).is_none() {
            queue.push_back(s.clone());
        }
    }
    while let Some(u) = queue.pop_front() {
        let d = dist[&u];
        if d >= cap {
            continue;
        }
        for w in oracle.neighbors(&u) {
            if !dist.contains_key(&w) {
                if dist.len() >= budget {
                    return Err(Error::Budget(budget));
                }
                dist.insert(w.clone(), d + 1);
                queue.push_back(w);
            }
        }
    }
    Ok(dist)
}

/// Distance from `u` to the nearest vertex satisfying `is_target`, capped.
pub fn distance_to<O: NeighborOracle>(
    oracle: &O,
    u: &O::Vertex,
    is_target: impl Fn(&O::Vertex) -> bool,
    cap: usize,
    budget: usize,
) -> Result<Distance> {
    if is_target(u) {
        return Ok(if cap > 0 { Distance::Exact(0) } else { Distance::AtLeast(0) });
    }
    let mut seen: HashMap<O::Vertex, usize> = HashMap::from([(u.clone(), 0)]);
    let mut frontier = vec![u.clone()];
    let mut d = 0;
    while !frontier.is_empty() && d + 1 < cap {
        d += 1;
        let mut next = Vec::new();
        for x in &frontier {
            for w in oracle.neighbors(x) {
                if seen.contains_key(&w) {
                    continue;
                }
                if is_target(&w) {
                    return Ok(Distance::Exact(d));
                }
                if seen.len() >= budget {
                    return Err(Error::Budget(budget));
                }
                seen.insert(w.clone(), d);
                next.push(w);
            }
        }
        frontier = next;
    }
    Ok(Distance::AtLeast(cap))
}

/// Oracle form of [`FiniteGraph::distance`].
pub fn distance<O: NeighborOracle>(
    oracle: &O,
    u: &O::Vertex,
    targets: &BTreeSet<O::Vertex>,
    cap: usize,
) -> Result<Distance> {
    distance_to(oracle, u, |v| targets.contains(v), cap, DEFAULT_BUDGET)
}

/// A finite induced piece of an oracle; id `i` of `graph` is `vertices[i]`.
#[derive(Clone, Debug)]
pub struct Materialized<V> {
    pub graph: FiniteGraph,
    pub vertices: Vec<V>,
}

impl<V: Ord + Clone> Materialized<V> {
    pub fn id_of(&self, v: &V) -> Option<VertexId> {
        self.vertices.iter().position(|u| u == v)
    }

    pub fn index(&self) -> BTreeMap<V, VertexId> {
        self.vertices.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect()
    }
}

/// Induced finite graph on the closed ball of `radius` around `seeds`.
pub fn materialize<O: NeighborOracle>(
    oracle: &O,
    seeds: &[O::Vertex],
    radius: usize,
    budget: usize,
) -> Result<Materialized<O::Vertex>> {
    let dist = ball(oracle, seeds, radius, budget)?;
    let mut set: Vec<_> = dist.into_keys().collect();
    set.sort();
    materialize_set(oracle, set)
}

/// Induced finite graph on an explicit vertex set (sorted and deduplicated).
pub fn materialize_set<O: NeighborOracle>(
    oracle: &O,
    mut set: Vec<O::Vertex>,
) -> Result<Materialized<O::Vertex>> {
    set.sort();
    set.dedup();
    for v in &set {
        if !oracle.contains(v) {
            return Err(Error::UnknownVertex(format!("{v:?}")));
        }
    }
    let index: HashMap<&O::Vertex, VertexId> = set.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let mut edges = Vec::new();
    if oracle.locally_finite() {
        for (i, v) in set.iter().enumerate() {
            for w in oracle.neighbors(v) {
                if let Some(&j) = index.get(&w) {
                    if j > i {
                        edges.push((i, j));
                    }
                }
            }
        }
    } else {
        for i in 0..set.len() {
            for j in i + 1..set.len() {
                if oracle.is_adjacent(&set[i], &set[j]) {
                    edges.push((i, j));
                }
            }
        }
    }
    let labels = set.iter().map(|v| oracle.key(v)).collect();
    let graph = FiniteGraph::from_edges(oracle.spec(), labels, edges)?;
    Ok(Materialized { graph, vertices: set })
}

/// Checks `u ∈ N(v) ⇔ v ∈ N(u)` and agreement with `is_adjacent` on `sample`.
pub fn symmetry_violations<O: NeighborOracle>(oracle: &O, sample: &[O::Vertex]) -> Vec<(O::Vertex, O::Vertex)> {
    let mut bad = Vec::new();
    for v in sample {
        for u in oracle.neighbors(v) {
            if u == *v || !oracle.is_adjacent(v, &u) || !oracle.is_adjacent(&u, v) || !oracle.neighbors(&u).contains(v) {
                bad.push((v.clone(), u));
            }
        }
    }
    bad
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::basic::{cycle, path};

    #[test]
    fn finite_graph_as_oracle_materializes_itself() {
        let g = cycle(6);
        let m = materialize(&g, &[0], 100, 1000).unwrap();
        assert_eq!(m.graph.n(), 6);
        assert_eq!(m.graph.edge_count(), 6);
        assert!(symmetry_violations(&g, &[0, 1, 2, 3, 4, 5]).is_empty());
    }

    #[test]
    fn ball_budget_is_enforced() {
        let g = path(50);
        assert!(matches!(ball(&g, &[0], 100, 10), Err(Error::Budget(10))));
        assert_eq!(ball(&g, &[0], 3, 10).unwrap().len(), 4);
    }

    #[test]
    fn oracle_distance_matches_graph_distance() {
        let g = cycle(7);
        for u in 0..7 {
            for t in 0..7 {
                let a = distance(&g, &u, &BTreeSet::from([t]), 10).unwrap();
                assert_eq!(a, g.distance(u, &[t], 10).unwrap());
            }
        }
    }
}
