//! Immutable finite simple graphs with dense ids and unique labels.
//!
//! Neighbor lists are kept sorted so every traversal is deterministic, and a
//! closed-neighborhood bit set per vertex makes domination tests a few word
//! operations.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::error::{Error, Result};

pub type VertexId = usize;

/// Format tag written into every graph JSON document.
pub const GRAPH_FORMAT: &str = "pursuit-graph-v1";

#[derive(Clone, Debug)]
pub struct FiniteGraph {
    name: String,
    labels: Vec<String>,
    adj: Vec<Vec<VertexId>>,
    closed: Vec<BitSet>,
    index: HashMap<String, VertexId>,
}

impl PartialEq for FiniteGraph {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.labels == other.labels && self.adj == other.adj
    }
}

impl Eq for FiniteGraph {}

/// Result of a capped breadth-first distance query.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Distance {
    Exact(usize),
    AtLeast(usize),
}

impl Distance {
    pub fn exact(self) -> Option<usize> {
        match self {
            Distance::Exact(d) => Some(d),
            Distance::AtLeast(_) => None,
        }
    }
}

#[derive(Default)]
pub struct GraphBuilder {
    name: String,
    labels: Vec<String>,
    edges: Vec<(VertexId, VertexId)>,
}

impl GraphBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        Self { name: name.into(), ..Default::default() }
    }

    pub fn add_vertex(&mut self, label: impl Into<String>) -> VertexId {
        self.labels.push(label.into());
        self.labels.len() - 1
    }

    pub fn add_edge(&mut self, u: VertexId, v: VertexId) {
        self.edges.push((u, v));
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn build(self) -> Result<FiniteGraph> {
        FiniteGraph::from_edges(self.name, self.labels, self.edges)
    }
}

impl FiniteGraph {
    /// Builds a graph, rejecting loops, out-of-range ids and duplicate
    /// labels. Parallel edges are merged.
    pub fn from_edges(
        name: impl Into<String>,
        labels: Vec<String>,
        edges: impl IntoIterator<Item = (VertexId, VertexId)>,
    ) -> Result<Self> {
        let n = labels.len();
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!("edge ({u},{v}) out of range 0..{n}")));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("loop at vertex {u}")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        let mut index = HashMap::with_capacity(n);
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::InvalidGraph(format!("duplicate label `{l}`")));
            }
        }
        let closed = adj
            .iter()
            .enumerate()
            .map(|(v, list)| {
                let mut s = BitSet::new(n);
                s.insert(v);
                for &u in list {
                    s.insert(u);
                }
                s
            })
            .collect();
        Ok(Self { name: name.into(), labels, adj, closed, index })
    }

    /// Graph with labels `0..n`.
    pub fn unlabeled(
        name: impl Into<String>,
        n: usize,
        edges: impl IntoIterator<Item = (VertexId, VertexId)>,
    ) -> Result<Self> {
        Self::from_edges(name, (0..n).map(|i| i.to_string()).collect(), edges)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, v: VertexId) -> &str {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn id(&self, label: &str) -> Result<VertexId> {
        self.index.get(label).copied().ok_or_else(|| Error::UnknownVertex(label.to_string()))
    }

    pub fn ids<S: AsRef<str>>(&self, labels: &[S]) -> Result<Vec<VertexId>> {
        labels.iter().map(|l| self.id(l.as_ref())).collect()
    }

    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.adj[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj[v].len()
    }

    pub fn closed_set(&self, v: VertexId) -> &BitSet {
        &self.closed[v]
    }

    pub fn is_adjacent(&self, u: VertexId, v: VertexId) -> bool {
        u != v && self.closed[u].contains(v)
    }

    /// Adjacent or equal.
    pub fn is_near(&self, u: VertexId, v: VertexId) -> bool {
        self.closed[u].contains(v)
    }

    fn check(&self, v: VertexId) -> Result<()> {
        if v < self.n() {
            Ok(())
        } else {
            Err(Error::UnknownVertex(v.to_string()))
        }
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn closed_neighborhood(&self, v: VertexId) -> Result<Vec<VertexId>> {
        self.check(v)?;
        Ok(self.closed[v].iter().collect())
    }

    /// `N[v] ⊆ N[u]`, for distinct `u` and `v`.
    pub fn dominates(&self, u: VertexId, v: VertexId) -> Result<bool> {
        self.check(u)?;
        self.check(v)?;
        if u == v {
            return Err(Error::SelfDomination(u));
        }
        Ok(self.closed[v].is_subset(&self.closed[u]))
    }

    /// Domination inside the subgraph induced by `alive`; both ends must be
    /// alive and distinct.
    #[inline]
    pub fn dominates_within(&self, u: VertexId, v: VertexId, alive: &BitSet) -> bool {
        u != v && self.closed[v].is_subset_within(&self.closed[u], alive)
    }

    /// All `u ≠ v` in `alive` dominating `v` inside `alive`.
    pub fn dominators_within(&self, v: VertexId, alive: &BitSet) -> Vec<VertexId> {
        self.adj[v]
            .iter()
            .copied()
            .filter(|&u| alive.contains(u) && self.dominates_within(u, v, alive))
            .collect()
    }

    /// Induced subgraph on `set` (duplicates ignored, order preserved); also
    /// returns the old id of each new id.
    pub fn induced(&self, set: &[VertexId]) -> Result<(FiniteGraph, Vec<VertexId>)> {
        let mut keep = Vec::with_capacity(set.len());
        let mut new_id = vec![usize::MAX; self.n()];
        for &v in set {
            self.check(v)?;
            if new_id[v] == usize::MAX {
                new_id[v] = keep.len();
                keep.push(v);
            }
        }
        let labels = keep.iter().map(|&v| self.labels[v].clone()).collect();
        let edges: Vec<_> = keep
            .iter()
            .flat_map(|&u| {
                let new_id = &new_id;
                self.adj[u]
                    .iter()
                    .filter(move |&&v| new_id[v] != usize::MAX && v > u)
                    .map(move |&v| (new_id[u], new_id[v]))
            })
            .collect();
        let g = FiniteGraph::from_edges(self.name.clone(), labels, edges)?;
        Ok((g, keep))
    }

    pub fn without(&self, v: VertexId) -> Result<(FiniteGraph, Vec<VertexId>)> {
        self.check(v)?;
        let keep: Vec<_> = (0..self.n()).filter(|&u| u != v).collect();
        self.induced(&keep)
    }

    pub fn is_connected(&self) -> bool {
        if self.n() == 0 {
            return false;
        }
        self.bfs(&[0]).iter().all(Option::is_some)
    }

    pub fn is_connected_within(&self, alive: &BitSet) -> bool {
        let Some(start) = alive.iter().next() else { return false };
        let mut seen = BitSet::new(self.n());
        seen.insert(start);
        let mut queue = VecDeque::from([start]);
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for &w in &self.adj[u] {
                if alive.contains(w) && !seen.contains(w) {
                    seen.insert(w);
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == alive.count()
    }

    /// Multi-source BFS distances.
    pub fn bfs(&self, sources: &[VertexId]) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s].is_none() {
                dist[s] = Some(0);
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            let d = dist[u].unwrap_or(0) + 1;
            for &w in &self.adj[u] {
                if dist[w].is_none() {
                    dist[w] = Some(d);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Distance from `u` to the nearest vertex of `targets`, or
    /// `AtLeast(cap)` when none is closer than `cap`.
    pub fn distance(&self, u: VertexId, targets: &[VertexId], cap: usize) -> Result<Distance> {
        self.check(u)?;
        for &t in targets {
            self.check(t)?;
        }
        let d = self.bfs(targets)[u];
        Ok(match d {
            Some(d) if d < cap => Distance::Exact(d),
            _ => Distance::AtLeast(cap),
        })
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            format: GRAPH_FORMAT.to_string(),
            name: self.name.clone(),
            vertices: self
                .labels
                .iter()
                .enumerate()
                .map(|(id, label)| JsonVertex { id, label: label.clone() })
                .collect(),
            edges: self.edges().map(|(i, j)| [i, j]).collect(),
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("graph json is serializable")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let doc: GraphJson = serde_json::from_str(s)?;
        Self::from_json(doc)
    }

    pub fn from_json(doc: GraphJson) -> Result<Self> {
        if doc.format != GRAPH_FORMAT {
            return Err(Error::InvalidGraph(format!("unknown format tag `{}`", doc.format)));
        }
        for (i, v) in doc.vertices.iter().enumerate() {
            if v.id != i {
                return Err(Error::InvalidGraph(format!("vertex ids must be contiguous; found {} at {i}", v.id)));
            }
        }
        let mut prev: Option<[usize; 2]> = None;
        for e in &doc.edges {
            if e[0] >= e[1] {
                return Err(Error::InvalidGraph(format!("edge {e:?} must satisfy i < j")));
            }
            if prev.is_some_and(|p| p >= *e) {
                return Err(Error::InvalidGraph("edges must be sorted and unique".into()));
            }
            prev = Some(*e);
        }
        let labels = doc.vertices.into_iter().map(|v| v.label).collect();
        Self::from_edges(doc.name, labels, doc.edges.into_iter().map(|[i, j]| (i, j)))
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "graph \"{}\" {{", self.name.replace('"', "'"));
        for (i, l) in self.labels.iter().enumerate() {
            let _ = writeln!(out, "  {i} [label=\"{}\"];", l.replace('"', "'"));
        }
        for (i, j) in self.edges() {
            let _ = writeln!(out, "  {i} -- {j};");
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonVertex {
    pub id: usize,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub format: String,
    pub name: String,
    pub vertices: Vec<JsonVertex>,
    pub edges: Vec<[usize; 2]>,
}

/// Small named graphs used throughout tests and specs.
pub mod basic {
    use super::*;

    /// Path on `n` vertices.
    pub fn path(n: usize) -> FiniteGraph {
        FiniteGraph::unlabeled(format!("path?n={n}"), n, (1..n).map(|i| (i - 1, i)))
            .expect("path is valid")
    }

    pub fn cycle(n: usize) -> FiniteGraph {
        assert!(n >= 3, "cycle needs at least 3 vertices");
        FiniteGraph::unlabeled(format!("cycle?n={n}"), n, (0..n).map(|i| (i, (i + 1) % n)))
            .expect("cycle is valid")
    }

    pub fn complete(n: usize) -> FiniteGraph {
        let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
        FiniteGraph::unlabeled(format!("complete?n={n}"), n, edges).expect("complete is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::basic::*;
    use super::*;

    fn abc_path() -> FiniteGraph {
        FiniteGraph::from_edges("abc", vec!["a".into(), "b".into(), "c".into()], [(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn closed_neighborhood_examples() {
        let g = path(1);
        assert_eq!(g.closed_neighborhood(0).unwrap(), vec![0]);
        let g = abc_path();
        assert_eq!(g.closed_neighborhood(1).unwrap(), vec![0, 1, 2]);
        assert!(matches!(g.closed_neighborhood(7), Err(Error::UnknownVertex(_))));
    }

    #[test]
    fn domination_on_triangle_and_self() {
        let g = complete(3);
        assert!(g.dominates(0, 1).unwrap());
        assert!(matches!(g.dominates(1, 1), Err(Error::SelfDomination(1))));
    }

    #[test]
    fn rejects_loops_and_duplicate_labels() {
        assert!(FiniteGraph::unlabeled("x", 2, [(1, 1)]).is_err());
        assert!(FiniteGraph::from_edges("x", vec!["a".into(), "a".into()], []).is_err());
    }

    #[test]
    fn induced_on_c4() {
        let g = cycle(4);
        let (h, back) = g.induced(&[0, 1]).unwrap();
        assert_eq!(h.n(), 2);
        assert_eq!(h.edge_count(), 1);
        assert_eq!(back, vec![0, 1]);
        let (all, _) = g.induced(&[0, 1, 2, 3]).unwrap();
        assert_eq!(all, g);
    }

    #[test]
    fn distances() {
        let g = cycle(4);
        assert_eq!(g.distance(0, &[2], 10).unwrap(), Distance::Exact(2));
        assert_eq!(g.distance(3, &[3], 10).unwrap(), Distance::Exact(0));
        assert_eq!(g.distance(0, &[2], 2).unwrap(), Distance::AtLeast(2));
        let two = FiniteGraph::unlabeled("2k1", 2, []).unwrap();
        assert_eq!(two.distance(0, &[1], 5).unwrap(), Distance::AtLeast(5));
        assert!(!two.is_connected());
    }

    #[test]
    fn json_rejects_bad_documents() {
        let good = cycle(4).to_json_string();
        assert_eq!(FiniteGraph::from_json_str(&good).unwrap(), cycle(4));
        let swapped = good.replacen("\"format\": \"pursuit-graph-v1\"", "\"format\": \"other\"", 1);
        assert!(FiniteGraph::from_json_str(&swapped).is_err());
        let mut doc = cycle(4).to_json();
        doc.edges.reverse();
        assert!(FiniteGraph::from_json(doc).is_err());
    }

    #[test]
    fn dot_lists_every_edge() {
        let dot = cycle(5).to_dot();
        assert_eq!(dot.matches(" -- ").count(), 5);
    }
}
