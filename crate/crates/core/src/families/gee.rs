//! The coordinate graph 𝒢: alternating C4 (odd positions) and P6 (even
//! positions) coordinates, finitely many non-zero.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;

use rand::{Rng, RngCore};

use crate::error::{Error, Result};
use crate::graph::FiniteGraph;
use crate::oracle::{materialize_set, NeighborOracle};

/// Largest stage that `make` will materialize (4^3 · 7^2 = 3136 vertices).
pub const MAX_STAGE: usize = 5;

/// Local neighborhoods stay within supports up to this bound (or the
/// vertex's own support when larger).
pub const LOCAL_REACH: usize = 8;

/// Coordinates at positions `1, 2, …` stored from index 0, trailing zeros
/// trimmed. The empty vertex is 0̂.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GeeVertex(Vec<u8>);

pub fn is_cycle_position(p: usize) -> bool {
    p % 2 == 1
}

fn max_value(p: usize) -> u8 {
    if is_cycle_position(p) {
        3
    } else {
        6
    }
}

impl GeeVertex {
    pub fn origin() -> Self {
        Self(Vec::new())
    }

    /// Validates ranges and trims trailing zeros.
    pub fn new(mut coords: Vec<u8>) -> Result<Self> {
        for (i, &c) in coords.iter().enumerate() {
            if c > max_value(i + 1) {
                return Err(Error::UnknownVertex(format!("coordinate {c} at position {}", i + 1)));
            }
        }
        while coords.last() == Some(&0) {
            coords.pop();
        }
        Ok(Self(coords))
    }

    /// The vertex with value `value` at position `p` and zero elsewhere.
    pub fn unit(p: usize, value: u8) -> Self {
        let mut c = vec![0; p];
        c[p - 1] = value;
        Self::new(c).expect("unit vertex in range")
    }

    /// Coordinate at 1-based position `p`.
    pub fn get(&self, p: usize) -> u8 {
        self.0.get(p - 1).copied().unwrap_or(0)
    }

    pub fn with(&self, p: usize, value: u8) -> Self {
        let mut c = self.0.clone();
        if c.len() < p {
            c.resize(p, 0);
        }
        c[p - 1] = value;
        Self::new(c).expect("coordinate in range")
    }

    /// Largest position with a non-zero coordinate, 0 for 0̂.
    pub fn support(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[u8] {
        &self.0
    }

    pub fn is_origin(&self) -> bool {
        self.0.is_empty()
    }

    pub fn has_six(&self) -> bool {
        self.0.iter().enumerate().any(|(i, &c)| !is_cycle_position(i + 1) && c == 6)
    }

    /// Non-zero positions.
    pub fn nonzero(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, &c)| c != 0).map(|(i, _)| i + 1)
    }
}

impl fmt::Display for GeeVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u8::to_string).collect();
        write!(f, "g({})", parts.join(","))
    }
}

pub fn cycle_near(a: u8, b: u8) -> bool {
    let d = (a + 4 - b) % 4;
    d <= 1 || d == 3
}

pub fn cycle_diff(a: u8, b: u8) -> u8 {
    let d = (a + 4 - b) % 4;
    d.min(4 - d)
}

fn p6_near(a: u8, b: u8) -> bool {
    a.abs_diff(b) <= 1
}

/// Adjacency of distinct vertices by the three-case coordinate rule.
pub fn adjacent(u: &GeeVertex, v: &GeeVertex) -> bool {
    if u == v {
        return false;
    }
    let len = u.support().max(v.support());
    let m1 = (1..=len).rev().find(|&p| is_cycle_position(p) && (u.get(p) != 0 || v.get(p) != 0)).unwrap_or(0);
    let m2 = (1..=len).rev().find(|&p| !is_cycle_position(p) && u.get(p) == 6 && v.get(p) == 6).unwrap_or(0);
    let paths_close_after =
        |start: usize| (start + 1..=len).filter(|&p| !is_cycle_position(p)).all(|p| p6_near(u.get(p), v.get(p)));
    if m1 == 0 && m2 == 0 {
        paths_close_after(0)
    } else if m1 < m2 {
        paths_close_after(m2)
    } else {
        (1..m1).all(|p| u.get(p) == v.get(p)) && cycle_near(u.get(m1), v.get(m1)) && paths_close_after(m1)
    }
}

/// Sum of per-coordinate differences (cyclic on C4 coordinates); a cheap
/// distance estimate for chasers.
pub fn coordinate_gap(u: &GeeVertex, v: &GeeVertex) -> u64 {
    let len = u.support().max(v.support());
    (1..=len)
        .map(|p| {
            let (a, b) = (u.get(p), v.get(p));
            u64::from(if is_cycle_position(p) { cycle_diff(a, b) } else { a.abs_diff(b) })
        })
        .sum()
}

/// All vertices with support at most `stage`, in key order.
pub fn stage_vertices(stage: usize) -> Vec<GeeVertex> {
    let mut out = vec![Vec::new()];
    for p in 1..=stage {
        out = out
            .into_iter()
            .flat_map(|c: Vec<u8>| {
                (0..=max_value(p)).map(move |x| {
                    let mut c = c.clone();
                    c.push(x);
                    c
                })
            })
            .collect();
    }
    let mut verts: Vec<_> = out.into_iter().map(|c| GeeVertex::new(c).expect("in range")).collect();
    verts.sort();
    verts
}

/// Lazy oracle for 𝒢. The graph is not locally finite (every vertex has
/// infinite degree), so `neighbors` returns the true neighbors that differ in
/// at most two positions and whose support is at most `max(LOCAL_REACH, s)`,
/// where `s` is the smaller of the two supports. The relation is symmetric
/// and finite; legality is always judged with `is_adjacent`.
#[derive(Clone, Debug, Default)]
pub struct GeeOracle;

const CACHE_LIMIT: usize = 4096;

thread_local! {
    static NEIGHBOR_CACHE: RefCell<HashMap<GeeVertex, Vec<GeeVertex>>> = RefCell::new(HashMap::new());
}

impl GeeOracle {
    fn local_pair(u: &GeeVertex, v: &GeeVertex) -> bool {
        let hamming = (1..=u.support().max(v.support())).filter(|&p| u.get(p) != v.get(p)).count();
        let (lo, hi) = (u.support().min(v.support()), u.support().max(v.support()));
        hamming <= 2 && hi <= LOCAL_REACH.max(lo)
    }

    fn reach(v: &GeeVertex) -> usize {
        LOCAL_REACH.max(v.support())
    }

    /// The `index`-th vertex differing from `v` in one or two positions up
    /// to `reach`, in a fixed enumeration.
    fn candidate(v: &GeeVertex, reach: usize, mut index: u64) -> GeeVertex {
        let alt = |p: usize, i: u64| {
            let i = i as u8;
            if i < v.get(p) {
                i
            } else {
                i + 1
            }
        };
        for p in 1..=reach {
            let kp = u64::from(max_value(p));
            if index < kp {
                return v.with(p, alt(p, index));
            }
            index -= kp;
            for q in p + 1..=reach {
                let kq = u64::from(max_value(q));
                if index < kp * kq {
                    return v.with(p, alt(p, index / kq)).with(q, alt(q, index % kq));
                }
                index -= kp * kq;
            }
        }
        unreachable!("candidate index out of range")
    }

    fn candidate_count(reach: usize) -> u64 {
        let mut total = 0;
        for p in 1..=reach {
            let kp = u64::from(max_value(p));
            total += kp;
            for q in p + 1..=reach {
                total += kp * u64::from(max_value(q));
            }
        }
        total
    }

    fn enumerate(v: &GeeVertex) -> Vec<GeeVertex> {
        let reach = Self::reach(v);
        let mut out: Vec<GeeVertex> = (0..Self::candidate_count(reach))
            .map(|i| Self::candidate(v, reach, i))
            .filter(|u| Self::local_pair(v, u) && adjacent(v, u))
            .collect();
        out.sort();
        out
    }
}

impl NeighborOracle for GeeOracle {
    type Vertex = GeeVertex;

    fn spec(&self) -> String {
        "gee".to_string()
    }

    fn key(&self, v: &GeeVertex) -> String {
        v.to_string()
    }

    fn parse_key(&self, key: &str) -> Result<GeeVertex> {
        let bad = || Error::UnknownVertex(key.to_string());
        let inner = key.strip_prefix("g(").and_then(|s| s.strip_suffix(')')).ok_or_else(bad)?;
        if inner.is_empty() {
            return Ok(GeeVertex::origin());
        }
        let coords = inner.split(',').map(|c| c.trim().parse::<u8>().map_err(|_| bad())).collect::<Result<Vec<_>>>()?;
        let v = GeeVertex::new(coords.clone())?;
        if v.coords() != coords.as_slice() {
            return Err(bad());
        }
        Ok(v)
    }

    fn contains(&self, v: &GeeVertex) -> bool {
        v.0.last() != Some(&0) && v.0.iter().enumerate().all(|(i, &c)| c <= max_value(i + 1))
    }

    fn neighbors(&self, v: &GeeVertex) -> Vec<GeeVertex> {
        if let Some(hit) = NEIGHBOR_CACHE.with(|c| c.borrow().get(v).cloned()) {
            return hit;
        }
        let out = Self::enumerate(v);
        NEIGHBOR_CACHE.with(|c| {
            let mut c = c.borrow_mut();
            if c.len() >= CACHE_LIMIT {
                c.clear();
            }
            c.insert(v.clone(), out.clone());
        });
        out
    }

    /// Rejection sampling over the candidate enumeration plus "stay", which
    /// is uniform over the closed local neighborhood.
    fn random_neighbor(&self, v: &GeeVertex, rng: &mut dyn RngCore) -> GeeVertex {
        let reach = Self::reach(v);
        let total = Self::candidate_count(reach) + 1;
        loop {
            let i = rng.gen_range(0..total);
            if i == 0 {
                return v.clone();
            }
            let u = Self::candidate(v, reach, i - 1);
            if Self::local_pair(v, &u) && adjacent(v, &u) {
                return u;
            }
        }
    }

    fn is_adjacent(&self, u: &GeeVertex, v: &GeeVertex) -> bool {
        adjacent(u, v)
    }

    fn locally_finite(&self) -> bool {
        false
    }

    fn potential(&self, v: &GeeVertex) -> Option<i64> {
        Some(v.support() as i64)
    }

    fn distance_hint(&self, u: &GeeVertex, v: &GeeVertex) -> u64 {
        coordinate_gap(u, v)
    }

    fn default_vertex(&self) -> GeeVertex {
        GeeVertex::origin()
    }

    fn sample_vertex(&self, rng: &mut dyn RngCore) -> GeeVertex {
        let len = rng.gen_range(0..=4);
        let coords = (1..=len).map(|p| rng.gen_range(0..=max_value(p))).collect();
        GeeVertex::new(coords).expect("in range")
    }
}

/// Finite stage: the vertices with support at most `stage`.
pub fn stage_graph(name: &str, stage: usize) -> Result<(FiniteGraph, Vec<GeeVertex>)> {
    if stage == 0 || stage > MAX_STAGE {
        return Err(Error::InvalidArgument(format!("gee stage must be in 1..={MAX_STAGE}")));
    }
    let m = materialize_set(&GeeOracle, stage_vertices(stage))?;
    Ok((m.graph.with_name(name), m.vertices))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::symmetry_violations;

    #[test]
    fn origin_neighbors_in_first_cycle() {
        let o = GeeVertex::origin();
        assert!(adjacent(&o, &GeeVertex::unit(1, 1)));
        assert!(adjacent(&o, &GeeVertex::unit(1, 3)));
        assert!(!adjacent(&o, &GeeVertex::unit(1, 2)));
        assert!(adjacent(&o, &GeeVertex::unit(9, 1)));
    }

    #[test]
    fn both_six_makes_lower_coordinates_free() {
        let a = GeeVertex::new(vec![2, 6]).unwrap();
        let b = GeeVertex::new(vec![0, 6, 0, 1]).unwrap();
        assert!(adjacent(&a, &b));
        let c = GeeVertex::new(vec![0, 6, 0, 2]).unwrap();
        assert!(!adjacent(&a, &c));
    }

    #[test]
    fn keys_round_trip() {
        let o = GeeOracle;
        for v in stage_vertices(3) {
            assert_eq!(o.parse_key(&o.key(&v)).unwrap(), v);
        }
        assert_eq!(o.key(&GeeVertex::origin()), "g()");
        assert!(o.parse_key("g(1,0)").is_err());
        assert!(o.parse_key("g(4)").is_err());
    }

    #[test]
    fn local_neighborhoods_are_symmetric() {
        let o = GeeOracle;
        let sample = vec![
            GeeVertex::origin(),
            GeeVertex::unit(1, 2),
            GeeVertex::new(vec![1, 6, 0, 3]).unwrap(),
            GeeVertex::unit(13, 1),
        ];
        assert!(symmetry_violations(&o, &sample).is_empty());
        assert!(o.neighbors(&GeeVertex::unit(13, 2)).contains(&GeeVertex::unit(13, 1)));
    }

    #[test]
    fn stage_sizes() {
        assert_eq!(stage_vertices(2).len(), 28);
        assert_eq!(stage_vertices(4).len(), 784);
    }
}
