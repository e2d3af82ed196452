//! Dismantling, construction certificates and searches over construction
//! orders.
//!
//! A certificate lists every vertex in construction order (root first) and
//! assigns each non-root vertex a parent that dominates it in the graph
//! induced by the prefix ending at that vertex.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::graph::{FiniteGraph, GraphJson, VertexId};

/// Subset-memoized searches refuse graphs larger than this.
pub const SUBSET_SEARCH_LIMIT: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub order: Vec<VertexId>,
    pub parents: BTreeMap<VertexId, VertexId>,
}

/// Wire form: `{"order":[labels...],"parents":{label:label}}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub order: Vec<String>,
    pub parents: BTreeMap<String, String>,
}

impl Certificate {
    pub fn root(&self) -> VertexId {
        self.order[0]
    }

    /// Trail of `v`: `v, δ(v), δ²(v), …` ending at the root.
    pub fn trail(&self, v: VertexId) -> Vec<VertexId> {
        let mut out = vec![v];
        let mut cur = v;
        while let Some(&p) = self.parents.get(&cur) {
            out.push(p);
            cur = p;
            if out.len() > self.order.len() {
                break;
            }
        }
        out
    }

    /// Position of each vertex in the construction order.
    pub fn positions(&self, n: usize) -> Vec<usize> {
        let mut pos = vec![usize::MAX; n];
        for (i, &v) in self.order.iter().enumerate() {
            if v < n {
                pos[v] = i;
            }
        }
        pos
    }

    pub fn to_json(&self, g: &FiniteGraph) -> CertificateJson {
        CertificateJson {
            order: self.order.iter().map(|&v| g.label(v).to_string()).collect(),
            parents: self
                .parents
                .iter()
                .map(|(&c, &p)| (g.label(c).to_string(), g.label(p).to_string()))
                .collect(),
        }
    }

    pub fn from_json(g: &FiniteGraph, doc: &CertificateJson) -> Result<Self> {
        let order = g.ids(&doc.order)?;
        let parents = doc
            .parents
            .iter()
            .map(|(c, p)| Ok((g.id(c)?, g.id(p)?)))
            .collect::<Result<_>>()?;
        Ok(Self { order, parents })
    }
}

/// Outcome of certificate validation; diagnostics point at the first failing
/// position of the order when there is one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Validation {
    Ok,
    Diagnostic { position: Option<usize>, reason: String },
}

impl Validation {
    pub fn is_ok(&self) -> bool {
        matches!(self, Validation::Ok)
    }

    pub fn into_result(self) -> Result<()> {
        match self {
            Validation::Ok => Ok(()),
            Validation::Diagnostic { position, reason } => Err(Error::InvalidCertificate(match position {
                Some(p) => format!("position {p}: {reason}"),
                None => reason,
            })),
        }
    }
}

fn diag(position: Option<usize>, reason: impl Into<String>) -> Validation {
    Validation::Diagnostic { position, reason: reason.into() }
}

pub fn validate(g: &FiniteGraph, cert: &Certificate) -> Validation {
    let n = g.n();
    if cert.order.len() != n {
        return diag(None, format!("order has {} entries for {n} vertices", cert.order.len()));
    }
    let mut seen = BitSet::new(n);
    for (i, &v) in cert.order.iter().enumerate() {
        if v >= n {
            return diag(Some(i), format!("unknown vertex {v}"));
        }
        if seen.contains(v) {
            return diag(Some(i), format!("vertex {} listed twice", g.label(v)));
        }
        seen.insert(v);
    }
    if cert.parents.len() != n.saturating_sub(1)
        || cert.order.iter().skip(1).any(|v| !cert.parents.contains_key(v))
    {
        return diag(None, "incomplete parents");
    }
    if cert.parents.contains_key(&cert.order[0]) {
        return diag(Some(0), "root has a parent");
    }
    let mut prefix = BitSet::new(n);
    prefix.insert(cert.order[0]);
    for (i, &v) in cert.order.iter().enumerate().skip(1) {
        let p = cert.parents[&v];
        prefix.insert(v);
        if p == v {
            return diag(Some(i), format!("{} is its own parent", g.label(v)));
        }
        if p >= n || !prefix.contains(p) {
            return diag(Some(i), format!("parent of {} is not constructed earlier", g.label(v)));
        }
        if !g.dominates_within(p, v, &prefix) {
            return diag(Some(i), format!("{} does not dominate {} in the prefix", g.label(p), g.label(v)));
        }
    }
    Validation::Ok
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Dismantling {
    /// `elimination` lists removed vertices in removal order.
    Constructible { certificate: Certificate, elimination: Vec<VertexId> },
    /// The induced subgraph left when no vertex was dominated.
    Stuck { witness: FiniteGraph, remaining: Vec<VertexId> },
}

impl Dismantling {
    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            Dismantling::Constructible { certificate, .. } => Some(certificate),
            Dismantling::Stuck { .. } => None,
        }
    }

    pub fn is_constructible(&self) -> bool {
        self.certificate().is_some()
    }
}

/// Wire form of a dismantling: the certificate, or the stuck subgraph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub graph: String,
    pub constructible: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub certificate: Option<CertificateJson>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<GraphJson>,
}

impl CheckReport {
    pub fn new(g: &FiniteGraph, d: &Dismantling) -> Self {
        match d {
            Dismantling::Constructible { certificate, .. } => Self {
                graph: g.name().to_string(),
                constructible: true,
                certificate: Some(certificate.to_json(g)),
                witness: None,
            },
            Dismantling::Stuck { witness, .. } => {
                Self { graph: g.name().to_string(), constructible: false, certificate: None, witness: Some(witness.to_json()) }
            }
        }
    }
}

fn finish(g: &FiniteGraph, alive: &BitSet, elimination: Vec<VertexId>, parents: BTreeMap<VertexId, VertexId>) -> Result<Dismantling> {
    if alive.count() == 1 {
        let root = alive.iter().next().expect("one vertex left");
        let mut order = vec![root];
        order.extend(elimination.iter().rev());
        Ok(Dismantling::Constructible { certificate: Certificate { order, parents }, elimination })
    } else {
        let remaining: Vec<_> = alive.iter().collect();
        let (witness, _) = g.induced(&remaining)?;
        Ok(Dismantling::Stuck { witness, remaining })
    }
}

/// Greedy dismantling: repeatedly removes the lowest-id dominated vertex,
/// recording its lowest-id dominator as parent.
pub fn dismantle(g: &FiniteGraph) -> Result<Dismantling> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let n = g.n();
    let mut alive = BitSet::full(n);
    let mut left = n;
    // Vertices outside `candidates` are known to be undominated; that only
    // changes when one of their neighbors is removed.
    let mut candidates: BTreeSet<VertexId> = (0..n).collect();
    let mut elimination = Vec::new();
    let mut parents = BTreeMap::new();
    while left > 1 {
        let mut step = None;
        while let Some(v) = candidates.pop_first() {
            if let Some(&p) = g.dominators_within(v, &alive).first() {
                step = Some((v, p));
                break;
            }
        }
        let Some((v, p)) = step else { break };
        alive.remove(v);
        left -= 1;
        elimination.push(v);
        parents.insert(v, p);
        candidates.extend(g.neighbors(v).iter().filter(|&&u| alive.contains(u)));
    }
    finish(g, &alive, elimination, parents)
}

/// Dismantling with uniformly random choices of vertex and dominator.
pub fn dismantle_randomized(g: &FiniteGraph, seed: u64) -> Result<Dismantling> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut alive = BitSet::full(g.n());
    let mut elimination = Vec::new();
    let mut parents = BTreeMap::new();
    let mut left = g.n();
    while left > 1 {
        let options: Vec<(VertexId, Vec<VertexId>)> = alive
            .iter()
            .map(|v| (v, g.dominators_within(v, &alive)))
            .filter(|(_, d)| !d.is_empty())
            .collect();
        let Some((v, doms)) = options.choose(&mut rng) else { break };
        let p = *doms.choose(&mut rng).expect("non-empty");
        alive.remove(*v);
        left -= 1;
        elimination.push(*v);
        parents.insert(*v, p);
    }
    finish(g, &alive, elimination, parents)
}

pub fn is_constructible(g: &FiniteGraph) -> bool {
    g.is_connected() && dismantle(g).map(|d| d.is_constructible()).unwrap_or(false)
}

/// All `u ≠ v` with `N[v] ⊆ N[u]`.
pub fn dominators(g: &FiniteGraph, v: VertexId) -> Result<Vec<VertexId>> {
    if v >= g.n() {
        return Err(Error::UnknownVertex(v.to_string()));
    }
    Ok(g.dominators_within(v, &BitSet::full(g.n())))
}

/// Whether `v` can be the last vertex of some construction order.
pub fn can_be_last(g: &FiniteGraph, v: VertexId) -> Result<bool> {
    if dominators(g, v)?.is_empty() {
        return Ok(false);
    }
    let (rest, _) = g.without(v)?;
    Ok(is_constructible(&rest))
}

struct SubsetSearch {
    n: usize,
    closed: Vec<u32>,
    buildable: Vec<u8>,
    extendable: Vec<u8>,
}

impl SubsetSearch {
    fn new(g: &FiniteGraph) -> Self {
        let n = g.n();
        let closed = (0..n).map(|v| g.closed_set(v).iter().fold(0u32, |m, u| m | 1 << u)).collect();
        Self { n, closed, buildable: vec![0; 1 << n], extendable: vec![0; 1 << n] }
    }

    fn dominated_in(&self, v: usize, set: u32) -> bool {
        let nv = self.closed[v] & set;
        (0..self.n).any(|u| u != v && set >> u & 1 == 1 && nv & !self.closed[u] == 0)
    }

    fn buildable(&mut self, set: u32) -> bool {
        match self.buildable[set as usize] {
            1 => return false,
            2 => return true,
            _ => {}
        }
        let ans = if set.count_ones() == 1 {
            true
        } else {
            (0..self.n).any(|v| set >> v & 1 == 1 && self.dominated_in(v, set) && self.buildable(set & !(1 << v)))
        };
        self.buildable[set as usize] = if ans { 2 } else { 1 };
        ans
    }

    fn extendable(&mut self, set: u32) -> bool {
        let full = (1u32 << self.n) - 1;
        if set == full {
            return true;
        }
        match self.extendable[set as usize] {
            1 => return false,
            2 => return true,
            _ => {}
        }
        let ans = (0..self.n).any(|v| {
            set >> v & 1 == 0 && self.dominated_in(v, set | 1 << v) && self.extendable(set | 1 << v)
        });
        self.extendable[set as usize] = if ans { 2 } else { 1 };
        ans
    }
}

/// Whether some construction order of `g` lists exactly `prefix` first.
pub fn order_exists_with_prefix(g: &FiniteGraph, prefix: &[VertexId]) -> Result<bool> {
    if g.n() > SUBSET_SEARCH_LIMIT {
        return Err(Error::TooLarge { got: g.n(), limit: SUBSET_SEARCH_LIMIT });
    }
    let mut set = 0u32;
    for &v in prefix {
        if v >= g.n() {
            return Err(Error::UnknownVertex(v.to_string()));
        }
        set |= 1 << v;
    }
    if set == 0 {
        return Ok(false);
    }
    let mut search = SubsetSearch::new(g);
    Ok(search.buildable(set) && search.extendable(set))
}

/// Edges `(u, v)` between non-root vertices whose parents are neither equal
/// nor adjacent. Edges at the root are exempt because the root has no parent.
pub fn homomorphism_failures(g: &FiniteGraph, cert: &Certificate) -> Result<Vec<(VertexId, VertexId)>> {
    validate(g, cert).into_result()?;
    Ok(g
        .edges()
        .filter(|&(u, v)| match (cert.parents.get(&u), cert.parents.get(&v)) {
            (Some(&pu), Some(&pv)) => !g.is_near(pu, pv),
            _ => false,
        })
        .collect())
}

pub fn is_homomorphism(g: &FiniteGraph, cert: &Certificate) -> Result<bool> {
    Ok(homomorphism_failures(g, cert)?.is_empty())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HomSearch {
    Found(Certificate),
    None,
    BudgetExceeded,
}

/// Wire form of a homomorphism search: `result` is `found`, `none` or
/// `budget`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomReport {
    pub graph: String,
    pub result: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub certificate: Option<CertificateJson>,
}

impl HomReport {
    pub fn new(g: &FiniteGraph, h: &HomSearch) -> Self {
        let (result, certificate) = match h {
            HomSearch::Found(c) => ("found", Some(c.to_json(g))),
            HomSearch::None => ("none", None),
            HomSearch::BudgetExceeded => ("budget", None),
        };
        Self { graph: g.name().to_string(), result: result.to_string(), certificate }
    }
}

struct HomSearcher<'a> {
    g: &'a FiniteGraph,
    closed: Vec<u64>,
    parent: Vec<Option<VertexId>>,
    removed: Vec<VertexId>,
    failed: HashSet<(u64, Vec<(u8, u8)>)>,
    deadline: Instant,
    nodes: u64,
    out_of_time: bool,
}

impl HomSearcher<'_> {
    fn signature(&self, alive: u64) -> Vec<(u8, u8)> {
        // Only parents of removed vertices that still touch `alive` constrain the future.
        let mut sig: Vec<(u8, u8)> = self
            .removed
            .iter()
            .filter(|&&u| self.closed[u] & alive != 0)
            .map(|&u| (u as u8, self.parent[u].expect("removed vertices have parents") as u8))
            .collect();
        sig.sort_unstable();
        sig
    }

    fn dfs(&mut self, alive: u64) -> bool {
        if alive.count_ones() == 1 {
            return true;
        }
        self.nodes += 1;
        if self.nodes % 4096 == 0 && Instant::now() > self.deadline {
            self.out_of_time = true;
        }
        if self.out_of_time {
            return false;
        }
        let key = (alive, self.signature(alive));
        if self.failed.contains(&key) {
            return false;
        }
        let n = self.g.n();
        for v in (0..n).filter(|&v| alive >> v & 1 == 1) {
            let nv = self.closed[v] & alive;
            let dominators: Vec<usize> =
                (0..n).filter(|&p| p != v && alive >> p & 1 == 1 && nv & !self.closed[p] == 0).collect();
            for p in dominators {
                let consistent = self.g.neighbors(v).iter().all(|&u| match self.parent[u] {
                    Some(pu) if alive >> u & 1 == 0 => self.g.is_near(pu, p),
                    _ => true,
                });
                if !consistent {
                    continue;
                }
                self.parent[v] = Some(p);
                self.removed.push(v);
                if self.dfs(alive & !(1 << v)) {
                    return true;
                }
                self.removed.pop();
                self.parent[v] = None;
                if self.out_of_time {
                    return false;
                }
            }
        }
        if !self.out_of_time {
            self.failed.insert(key);
        }
        false
    }
}

/// Exhaustive search for a construction order whose domination map is a
/// homomorphism, run in dismantling direction with incremental pruning.
pub fn search_hom(g: &FiniteGraph, budget: Duration) -> Result<HomSearch> {
    if g.n() > 64 {
        return Err(Error::TooLarge { got: g.n(), limit: 64 });
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let closed = (0..g.n()).map(|v| g.closed_set(v).iter().fold(0u64, |m, u| m | 1 << u)).collect();
    let mut s = HomSearcher {
        g,
        closed,
        parent: vec![None; g.n()],
        removed: Vec::new(),
        failed: HashSet::new(),
        deadline: Instant::now() + budget,
        nodes: 0,
        out_of_time: false,
    };
    let full = if g.n() == 64 { u64::MAX } else { (1u64 << g.n()) - 1 };
    if s.dfs(full) {
        let removed_mask = s.removed.iter().fold(0u64, |m, &v| m | 1 << v);
        let root = (0..g.n()).find(|&v| (full & !removed_mask) >> v & 1 == 1).expect("root left");
        let mut order = vec![root];
        order.extend(s.removed.iter().rev());
        let parents = s.removed.iter().map(|&v| (v, s.parent[v].expect("set"))).collect();
        let cert = Certificate { order, parents };
        debug_assert!(is_homomorphism(g, &cert).unwrap_or(false));
        return Ok(HomSearch::Found(cert));
    }
    Ok(if s.out_of_time { HomSearch::BudgetExceeded } else { HomSearch::None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::basic::{complete, cycle, path};

    fn abc() -> FiniteGraph {
        FiniteGraph::from_edges("abc", vec!["a".into(), "b".into(), "c".into()], [(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn c4_is_stuck_with_itself_as_witness() {
        match dismantle(&cycle(4)).unwrap() {
            Dismantling::Stuck { witness, remaining } => {
                assert_eq!(remaining, vec![0, 1, 2, 3]);
                assert_eq!(witness.edge_count(), 4);
            }
            other => panic!("expected stuck, got {other:?}"),
        }
    }

    #[test]
    fn dismantle_rejects_disconnected() {
        let g = FiniteGraph::unlabeled("two", 2, []).unwrap();
        assert!(matches!(dismantle(&g), Err(Error::Disconnected)));
    }

    #[test]
    fn single_vertex_is_constructible() {
        let d = dismantle(&path(1)).unwrap();
        assert_eq!(d.certificate().unwrap().order, vec![0]);
    }

    #[test]
    fn validate_flags_missing_parent() {
        let g = abc();
        let cert = Certificate { order: vec![0, 1, 2], parents: BTreeMap::from([(1, 0)]) };
        assert_eq!(validate(&g, &cert), diag(None, "incomplete parents"));
        let bad_order = Certificate { order: vec![0, 2, 1], parents: BTreeMap::from([(1, 0), (2, 1)]) };
        assert!(matches!(validate(&g, &bad_order), Validation::Diagnostic { position: Some(1), .. }));
    }

    #[test]
    fn homomorphism_examples() {
        let g = abc();
        let chain = Certificate { order: vec![0, 1, 2], parents: BTreeMap::from([(1, 0), (2, 1)]) };
        assert!(is_homomorphism(&g, &chain).unwrap());
        let t = complete(3);
        let star = Certificate { order: vec![0, 1, 2], parents: BTreeMap::from([(1, 0), (2, 0)]) };
        assert!(is_homomorphism(&t, &star).unwrap());
        let bogus = Certificate { order: vec![0, 1, 2], parents: BTreeMap::from([(1, 0)]) };
        assert!(is_homomorphism(&g, &bogus).is_err());
    }

    #[test]
    fn root_edges_are_exempt() {
        // Star with center 0 built from leaf 1: the edges at the root never count.
        let g = FiniteGraph::unlabeled("star", 4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        let cert = Certificate { order: vec![1, 0, 2, 3], parents: BTreeMap::from([(0, 1), (2, 0), (3, 0)]) };
        assert!(validate(&g, &cert).is_ok());
        assert!(is_homomorphism(&g, &cert).unwrap());
    }

    #[test]
    fn search_hom_positive_controls() {
        for g in [complete(3), path(4), path(2)] {
            match search_hom(&g, Duration::from_secs(5)).unwrap() {
                HomSearch::Found(c) => assert!(is_homomorphism(&g, &c).unwrap()),
                other => panic!("{}: {other:?}", g.name()),
            }
        }
        assert_eq!(search_hom(&cycle(4), Duration::from_secs(5)).unwrap(), HomSearch::None);
    }

    #[test]
    fn prefix_search_basics() {
        let g = path(4);
        assert!(order_exists_with_prefix(&g, &[0, 1, 2, 3]).unwrap());
        assert!(order_exists_with_prefix(&g, &[0, 3]).is_ok_and(|b| !b));
        for v in 0..4 {
            assert!(order_exists_with_prefix(&g, &[v]).unwrap());
        }
        assert!(!order_exists_with_prefix(&cycle(4), &[0]).unwrap());
        assert!(matches!(
            order_exists_with_prefix(&path(21), &[0]),
            Err(Error::TooLarge { got: 21, limit: 20 })
        ));
    }

    #[test]
    fn certificate_json_round_trip() {
        let g = abc();
        let cert = dismantle(&g).unwrap().certificate().unwrap().clone();
        let doc = cert.to_json(&g);
        let text = serde_json::to_string(&doc).unwrap();
        let back: CertificateJson = serde_json::from_str(&text).unwrap();
        assert_eq!(Certificate::from_json(&g, &back).unwrap(), cert);
    }
}
