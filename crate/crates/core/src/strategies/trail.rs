//! Trail-following cops driven by a parent map.

use std::collections::{BTreeMap, BTreeSet};

use rand::RngCore;

use crate::arena::Strategy;
use crate::error::{Error, Result};
use crate::graph::VertexId;
use crate::oracle::{CertifiedGraph, NeighborOracle};

use super::closed_neighbors;

/// Cop for a finite graph with a construction certificate: starts at the
/// root and moves to the earliest vertex on the robber's trail inside its
/// closed neighborhood. Checks that the trail index strictly decreases each
/// time the robber is seen again at the same vertex.
#[derive(Default)]
pub struct TrailCop {
    last_index: BTreeMap<VertexId, usize>,
    violations: Vec<String>,
    note: Option<String>,
    moves: u64,
}

impl TrailCop {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn moves(&self) -> u64 {
        self.moves
    }
}

impl Strategy<CertifiedGraph> for TrailCop {
    fn name(&self) -> String {
        "trail".into()
    }
    fn place(&mut self, oracle: &CertifiedGraph, _: Option<&VertexId>, _: &mut dyn RngCore) -> Result<VertexId> {
        Ok(oracle.root())
    }
    fn step(&mut self, oracle: &CertifiedGraph, me: &VertexId, opp: &VertexId, _: &mut dyn RngCore) -> Result<VertexId> {
        self.moves += 1;
        let targets: BTreeSet<_> = closed_neighbors(oracle, me).into_iter().collect();
        let Some((k, v)) = oracle.trail_hits(opp, &targets)? else {
            let reason = format!("no trail vertex of {} is within reach", oracle.key(opp));
            self.violations.push(reason.clone());
            return Err(Error::Strategy { name: "trail".into(), reason });
        };
        if let Some(&prev) = self.last_index.get(opp) {
            if k >= prev {
                self.violations.push(format!("trail index at {} went from {prev} to {k}", oracle.key(opp)));
            }
        }
        self.last_index.insert(*opp, k);
        self.note = Some(format!("k={k}"));
        Ok(v)
    }
    fn note(&mut self) -> Option<String> {
        self.note.take()
    }
    fn violations(&self) -> Vec<String> {
        self.violations.clone()
    }
}

/// Two-case cop for oracles with a consistent parent map. Case 1: some
/// vertex of the cop's closed neighborhood lies on the robber's trail, and
/// the cop moves to the earliest one. Case 2: the cop moves to its own
/// parent. Once Case 1 has occurred it must hold on every later move.
#[derive(Default)]
pub struct ConsistentCop {
    in_case_one: bool,
    case_one_from: Option<u64>,
    violations: Vec<String>,
    note: Option<String>,
    moves: u64,
}

impl ConsistentCop {
    pub fn new() -> Self {
        Self::default()
    }

    /// Cop move on which Case 1 first held.
    pub fn case_one_from(&self) -> Option<u64> {
        self.case_one_from
    }
}

impl<O: NeighborOracle> Strategy<O> for ConsistentCop {
    fn name(&self) -> String {
        "consistent".into()
    }
    fn place(&mut self, oracle: &O, _: Option<&O::Vertex>, _: &mut dyn RngCore) -> Result<O::Vertex> {
        if !oracle.supports_trails() {
            return Err(Error::Strategy { name: "consistent".into(), reason: "oracle has no parent map".into() });
        }
        Ok(oracle.default_vertex())
    }
    fn step(&mut self, oracle: &O, me: &O::Vertex, opp: &O::Vertex, _: &mut dyn RngCore) -> Result<O::Vertex> {
        self.moves += 1;
        let targets: BTreeSet<_> = closed_neighbors(oracle, me).into_iter().collect();
        if let Some((k, v)) = oracle.trail_hits(opp, &targets)? {
            if !self.in_case_one {
                self.in_case_one = true;
                self.case_one_from = Some(self.moves);
            }
            self.note = Some(format!("case=1 k={k}"));
            return Ok(v);
        }
        if self.in_case_one {
            self.violations.push(format!("left case 1 on move {}", self.moves));
        }
        self.note = Some("case=2".into());
        match oracle.parent(me) {
            Some(p) => Ok(p),
            None => {
                self.violations.push(format!("{} has no parent", oracle.key(me)));
                Ok(me.clone())
            }
        }
    }
    fn note(&mut self) -> Option<String> {
        self.note.take()
    }
    fn violations(&self) -> Vec<String> {
        self.violations.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arena::play;
    use crate::constructibility::dismantle;
    use crate::graph::basic::path;
    use crate::strategies::{RandomWalker, ShadowRobber};

    fn certified(g: crate::FiniteGraph) -> CertifiedGraph {
        let cert = dismantle(&g).unwrap().certificate().unwrap().clone();
        CertifiedGraph::new(g, &cert).unwrap()
    }

    #[test]
    fn trail_cop_walks_a_path() {
        let cg = certified(path(3));
        let t = play(&cg, &mut TrailCop::new(), &mut ShadowRobber::default(), 50, 0);
        assert!(t.captured() && t.is_legal());
        assert!(t.summary.violations.is_empty());
    }

    #[test]
    fn consistent_matches_trail_on_certified_graphs() {
        let cg = certified(crate::families::two_k());
        for seed in 0..10 {
            let a = play(&cg, &mut TrailCop::new(), &mut RandomWalker::default(), 200, seed);
            let b = play(&cg, &mut ConsistentCop::new(), &mut RandomWalker::default(), 200, seed);
            let keys = |t: &crate::arena::Transcript| t.events.iter().map(|e| e.key.clone()).collect::<Vec<_>>();
            assert_eq!(keys(&a), keys(&b));
            assert!(a.captured());
        }
    }
}
