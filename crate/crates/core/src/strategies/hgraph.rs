//! Staged robber and a hive-climbing cop for the locally finite graph ℋ.

use std::collections::HashMap;

use rand::RngCore;

use crate::arena::Strategy;
use crate::error::{Error, Result};
use crate::families::hgraph::{
    cycle_position, embed_to, g_near, height, hive_order, j_prime, nested_height, origin, pair, GVertex, HBase, JPrime,
};
use crate::families::{HGraph, HVertex};
use crate::graph::Distance;
use crate::oracle::NeighborOracle;

use super::closed_neighbors;

/// Vertex budget for the spine-distance check made on each Stage 2 entry.
pub const SPINE_CHECK_BUDGET: usize = 2_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HStage {
    One,
    Two,
    Three,
}

/// Position `c` (0 is the spine end) of the 4-cycle first added in `H_m`,
/// as a vertex of ℋ on level `m`.
pub fn cycle_vertex(m: u32, c: u8) -> HVertex {
    if c == 0 {
        HVertex::origin_at(m)
    } else {
        HVertex::new(m, pair(HBase::Cyc(c), 0))
    }
}

fn cyc_dist(a: u8, b: u8) -> u8 {
    let d = (a + 4 - b) % 4;
    d.min(4 - d)
}

/// Where the cop projects relative to the cycle of `H_m`.
enum Shadow {
    /// On the cycle, at this position.
    On(u8),
    /// In the `G_{m-1}` part, off the spine end; `near_end` when adjacent to it.
    Off { near_end: bool },
    /// A hive-type vertex of order at least `m`.
    Hive,
}

fn shadow(x: &HVertex, m: u32) -> Shadow {
    match j_prime(x, m).expect("m ≥ 1") {
        JPrime::Hive(_) => Shadow::Hive,
        JPrime::InH(h) => match cycle_position(&h, m) {
            Some(c) => Shadow::On(c),
            None => {
                let near_end = match &h {
                    HBase::Embedded(g) => g_near(g, &origin(m - 1), m - 1),
                    HBase::Cyc(_) => true,
                };
                Shadow::Off { near_end }
            }
        },
    }
}

/// Lower bound on `d_{H_m}(J'_m(x), y)` for the cycle position `y`, exact
/// when the projection lies on the cycle.
fn projected_gap(x: &HVertex, m: u32, y: u8) -> u8 {
    match shadow(x, m) {
        Shadow::On(c) => cyc_dist(c, y),
        Shadow::Off { near_end } => cyc_dist(0, y) + if near_end { 1 } else { 2 },
        Shadow::Hive => 0,
    }
}

/// Robber for ℋ that lives on one 4-cycle while the cop stays low, and runs
/// through the origin to a higher cycle whenever the cop climbs a hive.
pub struct HRobber {
    stage: HStage,
    /// Level of the committed cycle.
    m: u32,
    /// Largest hive order the cop reached in the current Stage 2.
    k_max: u32,
    /// Robber level at the latest Stage 2 entry.
    entry_level: u32,
    /// Robber moves since the latest Stage 2 entry.
    elapsed: u32,
    spine_checks: HashMap<HVertex, bool>,
    stage_two_entries: u64,
    origin_visits: u64,
    fallbacks: u64,
    unchecked: u64,
    violations: Vec<String>,
    note: Option<String>,
}

impl Default for HRobber {
    fn default() -> Self {
        Self {
            stage: HStage::One,
            m: 1,
            k_max: 0,
            entry_level: 0,
            elapsed: 0,
            spine_checks: HashMap::new(),
            stage_two_entries: 0,
            origin_visits: 0,
            fallbacks: 0,
            unchecked: 0,
            violations: Vec::new(),
            note: None,
        }
    }
}

impl HRobber {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn stage(&self) -> HStage {
        self.stage
    }

    pub fn committed(&self) -> u32 {
        self.m
    }

    pub fn origin_visits(&self) -> u64 {
        self.origin_visits
    }

    pub fn stage_two_entries(&self) -> u64 {
        self.stage_two_entries
    }

    /// Spine checks that neither the height bound nor the search could settle.
    pub fn unchecked_spine_checks(&self) -> u64 {
        self.unchecked
    }

    pub fn fallbacks(&self) -> u64 {
        self.fallbacks
    }

    fn m(&self) -> u32 {
        self.m
    }

    /// Checks the cop's distance to the spine on Stage 2 entry.
    fn check_spine_distance(&mut self, o: &HGraph, cop: &HVertex, k: u32) {
        let need = height(k) as usize + 1;
        let ok = match self.spine_checks.get(cop) {
            Some(&ok) => ok,
            None => {
                let ok = nested_height(&cop.g) as usize >= need
                    || match o.distance_to_spine(cop, need, SPINE_CHECK_BUDGET) {
                        Ok(Distance::AtLeast(_)) => true,
                        Ok(Distance::Exact(d)) => d >= need,
                        Err(_) => {
                            self.unchecked += 1;
                            true
                        }
                    };
                self.spine_checks.insert(cop.clone(), ok);
                ok
            }
        };
        if !ok {
            self.violations.push(format!("cop {cop} of hive order {k} is within {} of the spine", need - 1));
        }
    }

    fn enter_stage_two(&mut self, o: &HGraph, cop: &HVertex, me: &HVertex, k: u32) {
        self.stage = HStage::Two;
        self.k_max = k;
        self.entry_level = me.level;
        self.elapsed = 0;
        self.stage_two_entries += 1;
        self.check_spine_distance(o, cop, k);
    }

    /// Next vertex toward the origin: onto the spine, then down it.
    fn descend(&self, o: &HGraph, cop: &HVertex, me: &HVertex) -> HVertex {
        if me.is_spine() {
            return if me.level == 0 { me.clone() } else { HVertex::origin_at(me.level - 1) };
        }
        match &me.g {
            GVertex::Pair(b, 0) => match **b {
                HBase::Cyc(1) | HBase::Cyc(3) => HVertex::origin_at(me.level),
                _ => [1, 3]
                    .into_iter()
                    .map(|c| cycle_vertex(me.level, c))
                    .find(|w| !o.is_near(cop, w))
                    .unwrap_or_else(|| cycle_vertex(me.level, 1)),
            },
            _ => me.clone(),
        }
    }

    /// Next vertex from the origin toward the opposite point of the cycle on
    /// level `target`.
    fn ascend(&self, me: &HVertex, target: u32) -> HVertex {
        if me.is_spine() && me.level < target {
            return HVertex::origin_at(me.level + 1);
        }
        if me.is_spine() {
            return cycle_vertex(target, 1);
        }
        cycle_vertex(target, 2)
    }

    fn planned(&mut self, o: &HGraph, cop: &HVertex, me: &HVertex) -> HVertex {
        let order = hive_order(cop);
        match self.stage {
            HStage::One => {
                if let Some(k) = order.filter(|&k| k >= self.m()) {
                    self.enter_stage_two(o, cop, me, k);
                    return self.descend(o, cop, me);
                }
                let y = cycle_position(&me_base(me), self.m()).unwrap_or(0);
                let target = match shadow(cop, self.m()) {
                    Shadow::On(c) => (c + 2) % 4,
                    Shadow::Off { .. } if y != 0 => y,
                    Shadow::Off { .. } => 1,
                    Shadow::Hive => y,
                };
                cycle_vertex(self.m(), target)
            }
            HStage::Two => {
                if let Some(k) = order {
                    self.k_max = self.k_max.max(k);
                }
                self.descend(o, cop, me)
            }
            HStage::Three => {
                if let Some(k) = order.filter(|&k| k > self.k_max) {
                    self.enter_stage_two(o, cop, me, k);
                    return self.descend(o, cop, me);
                }
                self.ascend(me, self.k_max + 1)
            }
        }
    }

    fn fallback(&mut self, o: &HGraph, cop: &HVertex, me: &HVertex) -> HVertex {
        self.fallbacks += 1;
        o.neighbors(me)
            .into_iter()
            .chain(std::iter::once(me.clone()))
            .filter(|w| !o.is_near(cop, w))
            .max_by_key(|w| (o.distance_hint(cop, w), std::cmp::Reverse(w.clone())))
            .unwrap_or_else(|| me.clone())
    }
}

fn me_base(me: &HVertex) -> HBase {
    match &me.g {
        GVertex::Pair(b, _) => (**b).clone(),
        g => HBase::Embedded(g.clone()),
    }
}

impl Strategy<HGraph> for HRobber {
    fn name(&self) -> String {
        "hgraph".into()
    }
    fn place(&mut self, _: &HGraph, opp: Option<&HVertex>, _: &mut dyn RngCore) -> Result<HVertex> {
        let cop = opp.ok_or_else(|| Error::InvalidArgument("robber places after the cop".into()))?;
        self.m = (cop.level.max(hive_order(cop).unwrap_or(0)) + 1) as u32;
        self.stage = HStage::One;
        self.note = Some(format!("stage=1 m={}", self.m));
        Ok(cycle_vertex(self.m(), 2))
    }
    fn step(&mut self, o: &HGraph, me: &HVertex, opp: &HVertex, _: &mut dyn RngCore) -> Result<HVertex> {
        let mut next = self.planned(o, opp, me);
        if !o.is_near(me, &next) || o.is_near(opp, &next) {
            self.violations.push(format!("stage {:?} plan {next} unusable against cop {opp}", self.stage));
            next = self.fallback(o, opp, me);
        }
        match self.stage {
            HStage::One => {
                let y = cycle_position(&me_base(&next), self.m()).unwrap_or(0);
                if next.level != self.m() || projected_gap(opp, self.m(), y) < 2 {
                    self.violations.push(format!("stage 1 invariant fails: cop {opp} robber {next}"));
                }
            }
            HStage::Two => {
                self.elapsed += 1;
                if next.is_spine() && next.level == 0 {
                    self.origin_visits += 1;
                    self.stage = HStage::Three;
                }
            }
            HStage::Three => {
                self.elapsed += 1;
                let target = self.k_max + 1;
                if next == cycle_vertex(target, 2) {
                    let bound = self.entry_level + self.k_max + 5;
                    if self.elapsed > bound || self.elapsed > height(self.k_max) {
                        self.violations.push(format!(
                            "stages 2 and 3 took {} moves (bound {bound}, l = {})",
                            self.elapsed,
                            height(self.k_max)
                        ));
                    }
                    self.m = target;
                    self.stage = HStage::One;
                    if projected_gap(opp, self.m(), 2) < 2 {
                        self.violations.push(format!("stage 1 entry too close: cop {opp} robber {next}"));
                    }
                }
            }
        }
        let stage = match self.stage {
            HStage::One => 1,
            HStage::Two => 2,
            HStage::Three => 3,
        };
        self.note = Some(format!("stage={stage} m={} k={}", self.m, self.k_max));
        Ok(next)
    }
    fn note(&mut self) -> Option<String> {
        self.note.take()
    }
    fn violations(&self) -> Vec<String> {
        self.violations.clone()
    }
    fn contaminated(&self) -> bool {
        self.fallbacks > 0
    }
}

/// Cop that climbs the hive on the robber's level (capped at `top`): up the spine,
/// up the hive column above the spine, onto the hive vertex, a short chase,
/// then back the way it came.
pub struct HiveClimbCop {
    pub top: u32,
    pub chase: u32,
    target: u32,
    plan: Vec<HVertex>,
    trail: Vec<HVertex>,
    chasing: u32,
}

impl HiveClimbCop {
    pub fn new(top: u32, chase: u32) -> Self {
        Self { top: top.max(1), chase, target: 0, plan: Vec::new(), trail: Vec::new(), chasing: 0 }
    }

    /// Moves from the origin to the hive vertex of `G_t`.
    fn climb(t: u32) -> Vec<HVertex> {
        let mut out: Vec<_> = (1..=t).map(HVertex::origin_at).collect();
        let base = HBase::Embedded(embed_to(GVertex::Origin, 0, t - 1));
        out.extend((1..=height(t)).map(|i| HVertex::new(t, pair(base.clone(), i))));
        out.push(HVertex::new(t, GVertex::Hive(t)));
        out
    }
}

impl Strategy<HGraph> for HiveClimbCop {
    fn name(&self) -> String {
        format!("hive-climb?chase={}&top={}", self.chase, self.top)
    }
    fn place(&mut self, _: &HGraph, _: Option<&HVertex>, _: &mut dyn RngCore) -> Result<HVertex> {
        Ok(HVertex::origin_at(0))
    }
    fn step(&mut self, o: &HGraph, me: &HVertex, opp: &HVertex, _: &mut dyn RngCore) -> Result<HVertex> {
        if o.is_near(me, opp) {
            return Ok(opp.clone());
        }
        if self.plan.is_empty() && self.chasing == 0 {
            if let Some(back) = self.trail.pop() {
                return Ok(back);
            }
            self.target = opp.level.clamp(1, self.top);
            self.plan = Self::climb(self.target);
            self.plan.reverse();
        }
        self.trail.push(me.clone());
        if let Some(next) = self.plan.pop() {
            if self.plan.is_empty() {
                self.chasing = self.chase;
            }
            return Ok(next);
        }
        self.chasing -= 1;
        Ok(closed_neighbors(o, me).into_iter().min_by_key(|v| (o.distance_hint(v, opp), v.clone())).expect("non-empty"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arena::play;
    use crate::strategies::{RandomWalker, ShortestPathCop};

    #[test]
    fn climb_path_is_a_walk() {
        let o = HGraph::new();
        let mut prev = HVertex::origin_at(0);
        for v in HiveClimbCop::climb(2) {
            assert!(o.is_adjacent(&prev, &v), "{prev} {v}");
            prev = v;
        }
        assert_eq!(hive_order(&prev), Some(2));
    }

    #[test]
    fn survives_climbing_cop() {
        let o = HGraph::new();
        let mut r = HRobber::new();
        let t = play(&o, &mut HiveClimbCop::new(3, 4), &mut r, 1000, 0);
        assert!(!t.captured() && t.is_legal(), "{:?}", t.summary);
        assert!(t.summary.violations.is_empty(), "{:?}", t.summary.violations);
        assert!(r.origin_visits() >= 3, "{}", r.origin_visits());
    }

    #[test]
    fn survives_chaser_and_random() {
        let o = HGraph::new();
        for seed in 0..2 {
            let t = play(&o, &mut ShortestPathCop { budget: 8 }, &mut HRobber::new(), 300, seed);
            assert!(!t.captured() && t.is_legal() && t.summary.violations.is_empty(), "{:?}", t.summary);
            let t = play(&o, &mut RandomWalker::capped(3), &mut HRobber::new(), 300, seed);
            assert!(!t.captured() && t.is_legal() && t.summary.violations.is_empty(), "{:?}", t.summary);
        }
    }
}
