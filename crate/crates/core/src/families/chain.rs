//! The seven-vertex graph K and the families glued together from copies of
//! it: two_k, chains of K (finite truncations and a lazy oracle) and the
//! ω+1 surrogate.

use std::collections::BTreeSet;
use std::fmt;

use rand::{Rng, RngCore};

use crate::error::{Error, Result};
use crate::graph::{FiniteGraph, GraphBuilder, VertexId};
use crate::oracle::NeighborOracle;

/// Vertex roles inside one copy of K, in id order for the standalone graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    X,
    Y,
    Z,
    Zp,
    T,
    Tp,
    W,
}

impl Role {
    pub const ALL: [Role; 7] = [Role::X, Role::Y, Role::Z, Role::Zp, Role::T, Role::Tp, Role::W];

    pub fn name(self) -> &'static str {
        match self {
            Role::X => "x",
            Role::Y => "y",
            Role::Z => "z",
            Role::Zp => "z'",
            Role::T => "t",
            Role::Tp => "t'",
            Role::W => "w",
        }
    }
}

pub const K_EDGES: [(Role, Role); 14] = [
    (Role::Y, Role::X),
    (Role::Y, Role::Z),
    (Role::Y, Role::Zp),
    (Role::Y, Role::T),
    (Role::Y, Role::Tp),
    (Role::X, Role::T),
    (Role::X, Role::Tp),
    (Role::W, Role::T),
    (Role::W, Role::Z),
    (Role::W, Role::Tp),
    (Role::W, Role::Zp),
    (Role::Z, Role::T),
    (Role::Zp, Role::Tp),
    (Role::Z, Role::Zp),
];

fn k_adjacent(a: Role, b: Role) -> bool {
    K_EDGES.iter().any(|&(p, q)| (p, q) == (a, b) || (q, p) == (a, b))
}

/// Ids of one copy of K inside a larger graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KCopy {
    ids: [VertexId; 7],
}

impl KCopy {
    pub fn get(&self, r: Role) -> VertexId {
        self.ids[r as usize]
    }

    pub fn all(&self) -> [VertexId; 7] {
        self.ids
    }
}

/// Adds a copy of K whose labels carry `suffix`; roles in `reuse` are
/// identified with existing vertices instead of being created.
fn add_k(b: &mut GraphBuilder, suffix: &str, reuse: &[(Role, VertexId)]) -> KCopy {
    let mut ids = [0; 7];
    for r in Role::ALL {
        ids[r as usize] = match reuse.iter().find(|(q, _)| *q == r) {
            Some(&(_, id)) => id,
            None => b.add_vertex(format!("{}{suffix}", r.name())),
        };
    }
    for (p, q) in K_EDGES {
        b.add_edge(ids[p as usize], ids[q as usize]);
    }
    KCopy { ids }
}

pub fn k() -> FiniteGraph {
    let mut b = GraphBuilder::new("K");
    add_k(&mut b, "", &[]);
    b.build().expect("K is valid")
}

/// Two copies of K with the x of the first identified with the y of the second.
pub fn two_k() -> FiniteGraph {
    let mut b = GraphBuilder::new("two_k");
    let k1 = add_k(&mut b, "1", &[]);
    add_k(&mut b, "2", &[(Role::Y, k1.get(Role::X))]);
    b.build().expect("two_k is valid")
}

/// Finite chain of K copies with `y_i = x_{i+1}`.
#[derive(Clone, Debug)]
pub struct ChainTruncation {
    pub graph: FiniteGraph,
    /// Copies in left-to-right order; `blocks[j]` has index `first + j`.
    pub blocks: Vec<KCopy>,
    pub first: i64,
    pub hub: Option<VertexId>,
    pub boundary: Vec<VertexId>,
}

impl ChainTruncation {
    /// Position of the copy owning `v` in `blocks`, ignoring the shared
    /// `x`/`y` vertices, which belong to two copies.
    pub fn interior_block(&self, v: VertexId) -> Option<usize> {
        self.blocks
            .iter()
            .position(|b| [Role::Z, Role::Zp, Role::T, Role::Tp, Role::W].iter().any(|&r| b.get(r) == v))
    }
}

pub fn kchain(name: &str, blocks: usize, hub: bool, two_way: bool) -> Result<ChainTruncation> {
    if blocks == 0 {
        return Err(Error::InvalidArgument("kchain needs at least one block".into()));
    }
    let first = if two_way { 1 - blocks as i64 } else { 1 };
    let last = blocks as i64;
    let mut b = GraphBuilder::new(name);
    let mut copies: Vec<KCopy> = Vec::new();
    for i in first..=last {
        let mut reuse = vec![];
        if let Some(prev) = copies.last() {
            reuse.push((Role::X, prev.get(Role::Y)));
        } else {
            let x = b.add_vertex(format!("x{i}"));
            reuse.push((Role::X, x));
        }
        let y = b.add_vertex(format!("x{}", i + 1));
        reuse.push((Role::Y, y));
        copies.push(add_k(&mut b, &i.to_string(), &reuse));
    }
    let hub_id = hub.then(|| {
        let h = b.add_vertex("hub");
        for c in &copies {
            b.add_edge(h, c.get(Role::X));
            b.add_edge(h, c.get(Role::Y));
        }
        h
    });
    let mut boundary = vec![copies.last().expect("non-empty").get(Role::Y)];
    if two_way {
        boundary.push(copies[0].get(Role::X));
    }
    boundary.extend(hub_id);
    boundary.sort_unstable();
    Ok(ChainTruncation { graph: b.build()?, blocks: copies, first, hub: hub_id, boundary })
}

/// Finite ω+1 surrogate: `blocks` copies of K plus `A` (joined to every x
/// and y) and `B` (joined to every x and to A).
#[derive(Clone, Debug)]
pub struct Omega1 {
    pub graph: FiniteGraph,
    pub a: VertexId,
    pub b: VertexId,
    pub blocks: Vec<KCopy>,
}

pub fn omega1(name: &str, blocks: usize) -> Result<Omega1> {
    if blocks == 0 {
        return Err(Error::InvalidArgument("omega1 needs at least one block".into()));
    }
    let mut g = GraphBuilder::new(name);
    let a = g.add_vertex("A");
    let bv = g.add_vertex("B");
    g.add_edge(a, bv);
    let mut copies = Vec::new();
    for i in 1..=blocks {
        let c = add_k(&mut g, &i.to_string(), &[]);
        g.add_edge(a, c.get(Role::X));
        g.add_edge(a, c.get(Role::Y));
        g.add_edge(bv, c.get(Role::X));
        copies.push(c);
    }
    Ok(Omega1 { graph: g.build()?, a, b: bv, blocks: copies })
}

/// Successor step: a fresh copy of K whose y is identified with `b` and
/// whose x is joined to `a`. Returns the graph, `a` and the new x.
pub fn extend_with_k(g: &FiniteGraph, a: VertexId, b: VertexId) -> Result<(FiniteGraph, VertexId, VertexId)> {
    if a >= g.n() || b >= g.n() {
        return Err(Error::UnknownVertex(a.max(b).to_string()));
    }
    if a == b {
        return Err(Error::InvalidArgument("A and B must be distinct".into()));
    }
    if !g.is_adjacent(a, b) {
        return Err(Error::InvalidArgument("A must be adjacent to B".into()));
    }
    let mut builder = GraphBuilder::new(format!("{}+K", g.name()));
    for l in g.labels() {
        builder.add_vertex(l.clone());
    }
    for (u, v) in g.edges() {
        builder.add_edge(u, v);
    }
    let mut suffix = format!("#{}", g.n());
    while Role::ALL.iter().any(|r| g.id(&format!("{}{suffix}", r.name())).is_ok()) {
        suffix.push('#');
    }
    let copy = add_k(&mut builder, &suffix, &[(Role::Y, b)]);
    builder.add_edge(copy.get(Role::X), a);
    Ok((builder.build()?, a, copy.get(Role::X)))
}

/// Vertex of the infinite chain. `X` at block `i` is both `x_i` and
/// `y_{i-1}`; the role `Y` never occurs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChainVertex {
    pub block: i64,
    pub role: Role,
}

impl fmt::Display for ChainVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.role.name(), self.block)
    }
}

/// Lazy hubless chain of K copies, one-way (blocks `1, 2, …`) or two-way
/// (blocks indexed by all integers). Parents point rightward, as in a
/// construction of any finite block started from its right end.
#[derive(Clone, Debug)]
pub struct KChainOracle {
    pub two_way: bool,
}

impl KChainOracle {
    fn cv(block: i64, role: Role) -> ChainVertex {
        ChainVertex { block, role }
    }

    /// Representative of `(block, role)` with `y_i` rewritten as `x_{i+1}`.
    fn normal(block: i64, role: Role) -> ChainVertex {
        if role == Role::Y {
            Self::cv(block + 1, Role::X)
        } else {
            Self::cv(block, role)
        }
    }

    fn block_min(&self) -> i64 {
        if self.two_way {
            i64::MIN / 4
        } else {
            1
        }
    }
}

impl NeighborOracle for KChainOracle {
    type Vertex = ChainVertex;

    fn spec(&self) -> String {
        format!("kchain?direction={}", if self.two_way { "two" } else { "one" })
    }

    fn key(&self, v: &ChainVertex) -> String {
        v.to_string()
    }

    fn parse_key(&self, key: &str) -> Result<ChainVertex> {
        let bad = || Error::UnknownVertex(key.to_string());
        let role = [Role::Zp, Role::Tp, Role::X, Role::Z, Role::T, Role::W]
            .into_iter()
            .find(|r| key.starts_with(r.name()) && key[r.name().len()..].parse::<i64>().is_ok())
            .ok_or_else(bad)?;
        let block = key[role.name().len()..].parse().map_err(|_| bad())?;
        let v = Self::cv(block, role);
        if self.contains(&v) {
            Ok(v)
        } else {
            Err(bad())
        }
    }

    fn contains(&self, v: &ChainVertex) -> bool {
        v.role != Role::Y && v.block >= self.block_min()
    }

    fn neighbors(&self, v: &ChainVertex) -> Vec<ChainVertex> {
        let mut out = BTreeSet::new();
        let mut add_block = |i: i64, role: Role| {
            if i >= self.block_min() {
                for r in Role::ALL {
                    if r != role && k_adjacent(role, r) {
                        out.insert(Self::normal(i, r));
                    }
                }
            }
        };
        if v.role == Role::X {
            add_block(v.block, Role::X);
            add_block(v.block - 1, Role::Y);
        } else {
            add_block(v.block, v.role);
        }
        out.into_iter().collect()
    }

    fn is_adjacent(&self, u: &ChainVertex, v: &ChainVertex) -> bool {
        self.contains(u) && self.contains(v) && self.neighbors(u).contains(v)
    }

    fn parent(&self, v: &ChainVertex) -> Option<ChainVertex> {
        let i = v.block;
        Some(match v.role {
            Role::X | Role::Z | Role::Zp => Self::cv(i + 1, Role::X),
            Role::W | Role::T => Self::cv(i, Role::Z),
            Role::Tp => Self::cv(i, Role::Zp),
            Role::Y => return None,
        })
    }

    fn supports_trails(&self) -> bool {
        true
    }

    fn trail_hits(&self, v: &ChainVertex, targets: &BTreeSet<ChainVertex>) -> Result<Option<(usize, ChainVertex)>> {
        // Potentials never decrease along a trail, so the walk can stop once
        // it passes every target.
        let Some(max) = targets.iter().map(|t| t.block).max() else { return Ok(None) };
        let mut cur = *v;
        let mut k = 0;
        while cur.block <= max {
            if targets.contains(&cur) {
                return Ok(Some((k, cur)));
            }
            cur = self.parent(&cur).expect("chain vertices have parents");
            k += 1;
        }
        Ok(None)
    }

    fn potential(&self, v: &ChainVertex) -> Option<i64> {
        Some(v.block)
    }

    fn distance_hint(&self, u: &ChainVertex, v: &ChainVertex) -> u64 {
        2 * u.block.abs_diff(v.block)
    }

    fn default_vertex(&self) -> ChainVertex {
        Self::cv(1, Role::X)
    }

    fn sample_vertex(&self, rng: &mut dyn RngCore) -> ChainVertex {
        let block = if self.two_way { rng.gen_range(-5..=5) } else { rng.gen_range(1..=5) };
        let roles = [Role::X, Role::Z, Role::Zp, Role::T, Role::Tp, Role::W];
        Self::cv(block, roles[rng.gen_range(0..roles.len())])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{materialize_set, symmetry_violations};

    #[test]
    fn k_degrees() {
        let g = k();
        let deg: Vec<_> = Role::ALL.iter().map(|&r| g.degree(r as usize)).collect();
        assert_eq!(deg, vec![3, 5, 4, 4, 4, 4, 4]);
        assert_eq!(g.edge_count(), 14);
    }

    #[test]
    fn chain_sizes() {
        let c = kchain("c", 3, true, false).unwrap();
        assert_eq!(c.graph.n(), 20);
        let hub = c.hub.unwrap();
        let mut hn: Vec<_> = c.graph.neighbors(hub).iter().map(|&v| c.graph.label(v).to_string()).collect();
        hn.sort();
        assert_eq!(hn, vec!["x1", "x2", "x3", "x4"]);
        assert_eq!(kchain("c", 2, false, true).unwrap().graph.n(), 4 * 6 + 1);
        assert_eq!(two_k().n(), 13);
        assert_eq!(omega1("o", 2).unwrap().graph.n(), 16);
    }

    #[test]
    fn extend_adds_six_vertices() {
        let edge = FiniteGraph::from_edges("ab", vec!["A".into(), "B".into()], [(0, 1)]).unwrap();
        let (g, a, b) = extend_with_k(&edge, 0, 1).unwrap();
        assert_eq!((g.n(), g.edge_count(), a), (8, 16, 0));
        let (g2, _, _) = extend_with_k(&g, a, b).unwrap();
        assert_eq!(g2.n(), 14);
        assert!(extend_with_k(&edge, 0, 0).is_err());
    }

    #[test]
    fn oracle_matches_finite_truncation_inside() {
        let o = KChainOracle { two_way: false };
        let fin = kchain("c", 4, false, false).unwrap();
        let verts: Vec<_> = (1..=4)
            .flat_map(|i| Role::ALL.into_iter().filter(|&r| r != Role::Y).map(move |r| ChainVertex { block: i, role: r }))
            .chain([ChainVertex { block: 5, role: Role::X }])
            .collect();
        let m = materialize_set(&o, verts.clone()).unwrap();
        assert_eq!(m.graph.n(), fin.graph.n());
        assert_eq!(m.graph.edge_count(), fin.graph.edge_count());
        assert!(symmetry_violations(&o, &verts).is_empty());
        for v in &verts {
            assert_eq!(o.parse_key(&o.key(v)).unwrap(), *v);
        }
    }

    #[test]
    fn trail_hits_walks_right() {
        let o = KChainOracle { two_way: true };
        let w = ChainVertex { block: -2, role: Role::W };
        let target = ChainVertex { block: 0, role: Role::X };
        // w → z → x_{-1} → x_0
        assert_eq!(o.trail_hits(&w, &BTreeSet::from([target])).unwrap(), Some((3, target)));
        assert_eq!(o.trail_hits(&target, &BTreeSet::from([w])).unwrap(), None);
    }
}
