//! Family-agnostic strategies: solver-backed, random, chaser, shadow and the
//! K escape recipe.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use rand::{Rng, RngCore};

use crate::error::{Error, Result};
use crate::graph::{FiniteGraph, VertexId};
use crate::oracle::{CertifiedGraph, NeighborOracle};
use crate::solver::GameSolution;
use crate::arena::Strategy;

/// Oracles backed by a finite graph with dense ids.
pub trait HasGraph: NeighborOracle<Vertex = VertexId> {
    fn graph(&self) -> &FiniteGraph;
}

impl HasGraph for FiniteGraph {
    fn graph(&self) -> &FiniteGraph {
        self
    }
}

impl HasGraph for CertifiedGraph {
    fn graph(&self) -> &FiniteGraph {
        &self.graph
    }
}

/// `N[v]` in sorted order.
pub fn closed_neighbors<O: NeighborOracle>(oracle: &O, v: &O::Vertex) -> Vec<O::Vertex> {
    let mut out = oracle.neighbors(v);
    let pos = out.binary_search(v).unwrap_or_else(|p| p);
    out.insert(pos, v.clone());
    out
}

pub struct SolverCop {
    pub solution: Arc<GameSolution>,
}

impl<O: HasGraph> Strategy<O> for SolverCop {
    fn name(&self) -> String {
        "solver".into()
    }
    fn place(&mut self, _: &O, _: Option<&VertexId>, _: &mut dyn RngCore) -> Result<VertexId> {
        Ok(self.solution.cop_start)
    }
    fn step(&mut self, _: &O, me: &VertexId, opp: &VertexId, _: &mut dyn RngCore) -> Result<VertexId> {
        self.solution.cop_move(*me, *opp)
    }
}

pub struct SolverRobber {
    pub solution: Arc<GameSolution>,
}

impl<O: HasGraph> Strategy<O> for SolverRobber {
    fn name(&self) -> String {
        "solver".into()
    }
    fn place(&mut self, _: &O, opp: Option<&VertexId>, _: &mut dyn RngCore) -> Result<VertexId> {
        let cop = *opp.ok_or_else(|| Error::InvalidArgument("robber places after the cop".into()))?;
        if self.solution.is_forbidden(cop) {
            // Outside the solved arena every placement is as good as any.
            return Ok((0..self.solution.n()).find(|&r| r != cop).unwrap_or(cop));
        }
        self.solution.robber_start(cop)
    }
    fn step(&mut self, _: &O, me: &VertexId, opp: &VertexId, _: &mut dyn RngCore) -> Result<VertexId> {
        self.solution.robber_move(*opp, *me)
    }
}

/// Uniform over `N[v]`; placement is uniform over the oracle's sampler,
/// avoiding the cop's closed neighborhood when placing a robber. With a
/// `cap`, moves are uniform over the part of `N[v]` whose family potential
/// is at most `cap` (the current vertex always qualifies).
#[derive(Default)]
pub struct RandomWalker {
    pub cap: Option<i64>,
}

impl RandomWalker {
    pub fn capped(cap: i64) -> Self {
        Self { cap: Some(cap) }
    }
}

impl<O: NeighborOracle> Strategy<O> for RandomWalker {
    fn name(&self) -> String {
        match self.cap {
            Some(c) => format!("random?cap={c}"),
            None => "random".into(),
        }
    }
    fn place(&mut self, oracle: &O, opp: Option<&O::Vertex>, rng: &mut dyn RngCore) -> Result<O::Vertex> {
        let below = |v: &O::Vertex| self.cap.map_or(true, |c| oracle.potential(v).map_or(true, |p| p <= c));
        let mut v = oracle.sample_vertex(rng);
        for _ in 0..100 {
            if below(&v) && opp.map_or(true, |c| !oracle.is_near(c, &v)) {
                break;
            }
            v = oracle.sample_vertex(rng);
        }
        if !below(&v) {
            v = oracle.default_vertex();
        }
        Ok(v)
    }
    fn step(&mut self, oracle: &O, me: &O::Vertex, _: &O::Vertex, rng: &mut dyn RngCore) -> Result<O::Vertex> {
        let Some(cap) = self.cap else {
            return Ok(oracle.random_neighbor(me, rng));
        };
        let options: Vec<_> = closed_neighbors(oracle, me)
            .into_iter()
            .filter(|v| v == me || oracle.potential(v).map_or(true, |p| p <= cap))
            .collect();
        Ok(options[rng.gen_range(0..options.len())].clone())
    }
}

/// Moves along a shortest path toward the robber. Distances come from a
/// breadth-first search around the robber that stops after `budget`
/// vertices; outside that ball the oracle's distance hint decides.
pub struct ShortestPathCop {
    pub budget: usize,
}

impl ShortestPathCop {
    fn distances<O: NeighborOracle>(&self, oracle: &O, from: &O::Vertex) -> HashMap<O::Vertex, usize> {
        let mut dist = HashMap::from([(from.clone(), 0)]);
        let mut queue = VecDeque::from([from.clone()]);
        while let Some(u) = queue.pop_front() {
            if dist.len() >= self.budget {
                break;
            }
            let d = dist[&u];
            for w in oracle.neighbors(&u) {
                if !dist.contains_key(&w) {
                    dist.insert(w.clone(), d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }
}

impl<O: NeighborOracle> Strategy<O> for ShortestPathCop {
    fn name(&self) -> String {
        format!("shortest-path?budget={}", self.budget)
    }
    fn place(&mut self, oracle: &O, _: Option<&O::Vertex>, _: &mut dyn RngCore) -> Result<O::Vertex> {
        Ok(oracle.default_vertex())
    }
    fn step(&mut self, oracle: &O, me: &O::Vertex, opp: &O::Vertex, _: &mut dyn RngCore) -> Result<O::Vertex> {
        if oracle.is_near(me, opp) {
            return Ok(opp.clone());
        }
        let dist = self.distances(oracle, opp);
        let options = closed_neighbors(oracle, me);
        let key = |v: &O::Vertex| match dist.get(v) {
            Some(&d) => (0, d as u64),
            None => (1, oracle.distance_hint(v, opp)),
        };
        Ok(options.iter().min_by_key(|v| key(v)).expect("N[v] contains v").clone())
    }
}

/// Stays outside the cop's closed neighborhood: stays put when safe,
/// otherwise takes the safe move farthest from the cop.
#[derive(Default)]
pub struct ShadowRobber {
    fallbacks: u64,
}

fn far_from<O: NeighborOracle>(oracle: &O, cop: &O::Vertex, options: &[O::Vertex]) -> Option<O::Vertex> {
    options.iter().max_by_key(|v| (oracle.distance_hint(cop, v), std::cmp::Reverse((*v).clone()))).cloned()
}

impl<O: NeighborOracle> Strategy<O> for ShadowRobber {
    fn name(&self) -> String {
        "shadow".into()
    }
    fn place(&mut self, oracle: &O, opp: Option<&O::Vertex>, rng: &mut dyn RngCore) -> Result<O::Vertex> {
        let cop = opp.ok_or_else(|| Error::InvalidArgument("robber places after the cop".into()))?;
        let mut options: Vec<_> = oracle.neighbors(cop).iter().flat_map(|u| oracle.neighbors(u)).collect();
        options.push(oracle.default_vertex());
        for _ in 0..16 {
            options.push(oracle.sample_vertex(rng));
        }
        options.sort();
        options.dedup();
        let safe: Vec<_> = options.into_iter().filter(|v| !oracle.is_near(cop, v)).collect();
        Ok(far_from(oracle, cop, &safe).unwrap_or_else(|| oracle.default_vertex()))
    }
    fn step(&mut self, oracle: &O, me: &O::Vertex, opp: &O::Vertex, _: &mut dyn RngCore) -> Result<O::Vertex> {
        if !oracle.is_near(opp, me) {
            return Ok(me.clone());
        }
        let safe: Vec<_> = oracle.neighbors(me).into_iter().filter(|w| !oracle.is_near(opp, w)).collect();
        match far_from(oracle, opp, &safe) {
            Some(v) => Ok(v),
            None => {
                self.fallbacks += 1;
                Ok(me.clone())
            }
        }
    }
}

/// Shadow robber for finite graphs, with exact distances for placement and
/// tie-breaking.
#[derive(Default)]
pub struct FiniteShadow;

impl<O: HasGraph> Strategy<O> for FiniteShadow {
    fn name(&self) -> String {
        "shadow".into()
    }
    fn place(&mut self, oracle: &O, opp: Option<&VertexId>, _: &mut dyn RngCore) -> Result<VertexId> {
        let cop = *opp.ok_or_else(|| Error::InvalidArgument("robber places after the cop".into()))?;
        let d = oracle.graph().bfs(&[cop]);
        Ok((0..oracle.graph().n()).max_by_key(|&v| (d[v].unwrap_or(usize::MAX), std::cmp::Reverse(v))).unwrap_or(cop))
    }
    fn step(&mut self, oracle: &O, me: &VertexId, opp: &VertexId, _: &mut dyn RngCore) -> Result<VertexId> {
        let g = oracle.graph();
        if !g.is_near(*opp, *me) {
            return Ok(*me);
        }
        let d = g.bfs(&[*opp]);
        Ok(g.neighbors(*me)
            .iter()
            .copied()
            .filter(|&w| !g.is_near(*opp, w))
            .max_by_key(|&w| (d[w], std::cmp::Reverse(w)))
            .unwrap_or(*me))
    }
}

/// Escape recipe inside a copy of K: wait at `w`; answer a cop at `t` or `z`
/// with `t'` and a cop at `t'` or `z'` with `t`; from `t`/`t'` stay, return
/// to `w` or exit via `x`. Any other situation takes a safe move if one
/// exists. Vertices are recognised by the labels `x y z z' t t' w`.
#[derive(Default)]
pub struct KEscapeRobber {
    reached_x: bool,
}

impl KEscapeRobber {
    pub fn reached_x(&self) -> bool {
        self.reached_x
    }
}

impl<O: HasGraph> Strategy<O> for KEscapeRobber {
    fn name(&self) -> String {
        "k-escape".into()
    }
    fn place(&mut self, oracle: &O, opp: Option<&VertexId>, _: &mut dyn RngCore) -> Result<VertexId> {
        let g = oracle.graph();
        let cop = *opp.ok_or_else(|| Error::InvalidArgument("robber places after the cop".into()))?;
        let pref = ["w", "t", "t'", "x"];
        pref.iter()
            .filter_map(|l| g.id(l).ok())
            .find(|&v| !g.is_near(cop, v))
            .or_else(|| (0..g.n()).find(|&v| !g.is_near(cop, v)))
            .ok_or_else(|| Error::Strategy { name: "k-escape".into(), reason: "no safe placement".into() })
    }
    fn step(&mut self, oracle: &O, me: &VertexId, opp: &VertexId, _: &mut dyn RngCore) -> Result<VertexId> {
        let g = oracle.graph();
        let id = |l: &str| g.id(l).ok();
        let safe = |v: VertexId| g.is_near(*me, v) && !g.is_near(*opp, v);
        let label = g.label(*me);
        let cop = g.label(*opp);
        let plan: Vec<&str> = match label {
            "w" if cop == "t" || cop == "z" => vec!["t'"],
            "w" if cop == "t'" || cop == "z'" => vec!["t"],
            "w" => vec!["w"],
            "t" | "t'" => vec![label, "w", "x"],
            "x" => vec!["x"],
            _ => vec!["w", "t", "t'", "x"],
        };
        let choice = plan
            .iter()
            .filter_map(|l| id(l))
            .find(|&v| safe(v))
            .or_else(|| g.neighbors(*me).iter().copied().find(|&v| safe(v)))
            .unwrap_or(*me);
        if g.label(choice) == "x" {
            self.reached_x = true;
        }
        Ok(choice)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arena::play;
    use crate::graph::basic::{cycle, path};

    #[test]
    fn shadow_survives_c4() {
        let g = cycle(4);
        let t = play(&g, &mut ShortestPathCop { budget: 100 }, &mut FiniteShadow, 1000, 3);
        assert!(!t.captured() && t.is_legal());
        let t = play(&g, &mut RandomWalker::default(), &mut ShadowRobber::default(), 1000, 4);
        assert!(!t.captured() && t.is_legal());
    }

    #[test]
    fn chaser_catches_on_path() {
        let g = path(8);
        let t = play(&g, &mut ShortestPathCop { budget: 100 }, &mut FiniteShadow, 100, 1);
        assert!(t.captured());
    }

    #[test]
    fn closed_neighbors_sorted() {
        assert_eq!(closed_neighbors(&cycle(5), &2), vec![1, 2, 3]);
        assert_eq!(closed_neighbors(&cycle(5), &0), vec![0, 1, 4]);
    }
}
