//! Staged robber and a coordinate-climbing cop for the graph 𝒢.

use rand::RngCore;

use crate::arena::Strategy;
use crate::error::{Error, Result};
use crate::families::gee::{cycle_diff, is_cycle_position};
use crate::families::{GeeOracle, GeeVertex};
use crate::oracle::NeighborOracle;

use super::closed_neighbors;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeeStage {
    /// Committed to a cycle and keeping the cop away in that coordinate.
    One,
    /// The cop holds a 6 in a path coordinate; heading for 0̂.
    Two,
    /// At 0̂; about to commit to a fresh cycle.
    Three,
}

/// Smallest cycle position beyond every non-zero coordinate of `v`.
fn fresh_cycle(v: &GeeVertex) -> usize {
    let s = v.support() + 1;
    if is_cycle_position(s) {
        s
    } else {
        s + 1
    }
}

/// Robber that always sits at 0̂ or on a single cycle coordinate `m`.
/// Only `is_adjacent` is used, since 0̂ has infinite degree.
pub struct GeeRobber {
    stage: GeeStage,
    m: usize,
    last_cop: Option<GeeVertex>,
    /// Coordinate lower bound on the cop's distance to 0̂ at Stage 2 entry.
    stage_two_entries: Vec<u64>,
    returns: u64,
    fallbacks: u64,
    violations: Vec<String>,
    note: Option<String>,
}

impl Default for GeeRobber {
    fn default() -> Self {
        Self {
            stage: GeeStage::One,
            m: 1,
            last_cop: None,
            stage_two_entries: Vec::new(),
            returns: 0,
            fallbacks: 0,
            violations: Vec::new(),
            note: None,
        }
    }
}

/// Lower bound on the distance from `v` to 0̂: the value of the last path
/// coordinate holding a 6 must return to 0 one step at a time.
pub fn six_bound(v: &GeeVertex) -> u64 {
    if v.has_six() {
        6
    } else {
        0
    }
}

impl GeeRobber {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn stage(&self) -> GeeStage {
        self.stage
    }

    pub fn committed(&self) -> usize {
        self.m
    }

    /// Number of times the robber arrived at 0̂.
    pub fn returns(&self) -> u64 {
        self.returns
    }

    pub fn fallbacks(&self) -> u64 {
        self.fallbacks
    }

    pub fn stage_two_entries(&self) -> &[u64] {
        &self.stage_two_entries
    }

    fn at(&self, value: u8) -> GeeVertex {
        if value == 0 {
            GeeVertex::origin()
        } else {
            GeeVertex::unit(self.m, value)
        }
    }

    /// Stage 1 invariant between the cop at `cop` and the robber at `me`.
    fn stage_one_holds(&self, cop: &GeeVertex, me: &GeeVertex) -> bool {
        let d = cycle_diff(cop.get(self.m), me.get(self.m));
        d == 2 || (d == 1 && cop.nonzero().any(|p| p < self.m))
    }

    fn planned(&mut self, cop: &GeeVertex, me: &GeeVertex) -> GeeVertex {
        if me.is_origin() {
            self.m = fresh_cycle(cop);
            self.stage = GeeStage::One;
            return self.at(1);
        }
        let a = me.get(self.m);
        if cop.has_six() {
            if self.stage != GeeStage::Two {
                self.stage = GeeStage::Two;
                self.stage_two_entries.push(six_bound(cop));
                // The robber may wait on the entry turn.
                if !GeeOracle.is_near(cop, me) {
                    return me.clone();
                }
            }
            return match a {
                2 => [1, 3].into_iter().map(|x| self.at(x)).find(|w| !GeeOracle.is_near(cop, w)).unwrap_or_else(|| self.at(1)),
                _ => GeeVertex::origin(),
            };
        }
        self.stage = GeeStage::One;
        let c_new = cop.get(self.m);
        let c_old = self.last_cop.as_ref().map_or(c_new, |v| v.get(self.m));
        let target = if c_new != c_old {
            // Keep the difference in the committed coordinate.
            ((a as i16 + c_new as i16 - c_old as i16).rem_euclid(4)) as u8
        } else if cycle_diff(c_new, a) >= 2 {
            a
        } else {
            (c_new + 2) % 4
        };
        self.at(target)
    }

    fn fallback(&mut self, cop: &GeeVertex, me: &GeeVertex) -> GeeVertex {
        self.fallbacks += 1;
        let mut options = vec![me.clone(), GeeVertex::origin()];
        options.extend((1..=3).map(|x| self.at(x)));
        let fresh = fresh_cycle(cop).max(fresh_cycle(me));
        options.extend((1..=3).map(|x| GeeVertex::unit(fresh, x)));
        let o = GeeOracle;
        options
            .into_iter()
            .filter(|w| o.is_near(me, w) && !o.is_near(cop, w))
            .max_by_key(|w| (o.distance_hint(cop, w), std::cmp::Reverse(w.clone())))
            .unwrap_or_else(|| me.clone())
    }
}

impl Strategy<GeeOracle> for GeeRobber {
    fn name(&self) -> String {
        "gee".into()
    }
    fn place(&mut self, _: &GeeOracle, opp: Option<&GeeVertex>, _: &mut dyn RngCore) -> Result<GeeVertex> {
        let cop = opp.ok_or_else(|| Error::InvalidArgument("robber places after the cop".into()))?;
        self.m = fresh_cycle(cop);
        self.last_cop = Some(cop.clone());
        self.stage = if cop.has_six() { GeeStage::Two } else { GeeStage::One };
        self.note = Some(format!("stage=1 m={}", self.m));
        Ok(self.at(2))
    }
    fn step(&mut self, o: &GeeOracle, me: &GeeVertex, opp: &GeeVertex, _: &mut dyn RngCore) -> Result<GeeVertex> {
        let was_origin = me.is_origin();
        let mut next = self.planned(opp, me);
        if !o.is_near(me, &next) || o.is_near(opp, &next) {
            self.violations.push(format!("stage {:?} plan {} unusable against cop {}", self.stage, next, opp));
            next = self.fallback(opp, me);
        }
        if next.is_origin() && !was_origin {
            self.returns += 1;
            self.stage = GeeStage::Three;
        }
        if self.stage == GeeStage::One && !self.stage_one_holds(opp, &next) {
            self.violations.push(format!("stage 1 invariant fails: cop {opp} robber {next}"));
        }
        self.last_cop = Some(opp.clone());
        let stage = match self.stage {
            GeeStage::One => 1,
            GeeStage::Two => 2,
            GeeStage::Three => 3,
        };
        self.note = Some(format!("stage={stage} m={}", self.m));
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

/// Cop that repeatedly pushes path coordinate 2 up to 6, holds it for three
/// turns, chases the robber by coordinate gap for a while, then walks back
/// to 0̂.
pub struct ClimbCop {
    pub chase: u32,
    phase: Phase,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Phase {
    Climb,
    Hold(u32),
    Chase(u32),
    Home,
}

impl ClimbCop {
    pub fn new(chase: u32) -> Self {
        Self { chase, phase: Phase::Climb }
    }
}

impl Strategy<GeeOracle> for ClimbCop {
    fn name(&self) -> String {
        format!("climb?chase={}", self.chase)
    }
    fn place(&mut self, _: &GeeOracle, _: Option<&GeeVertex>, _: &mut dyn RngCore) -> Result<GeeVertex> {
        Ok(GeeVertex::origin())
    }
    fn step(&mut self, o: &GeeOracle, me: &GeeVertex, opp: &GeeVertex, _: &mut dyn RngCore) -> Result<GeeVertex> {
        if o.is_near(me, opp) {
            return Ok(opp.clone());
        }
        let toward = |target: &GeeVertex| {
            closed_neighbors(o, me).into_iter().min_by_key(|v| (o.distance_hint(v, target), v.clone())).expect("non-empty")
        };
        loop {
            match self.phase {
                Phase::Climb if me.get(2) < 6 && me.nonzero().all(|p| p == 2) => return Ok(me.with(2, me.get(2) + 1)),
                Phase::Climb => self.phase = Phase::Hold(0),
                Phase::Hold(k) if k < 3 => {
                    self.phase = Phase::Hold(k + 1);
                    return Ok(me.clone());
                }
                Phase::Hold(_) => self.phase = Phase::Chase(0),
                Phase::Chase(k) if k < self.chase => {
                    self.phase = Phase::Chase(k + 1);
                    return Ok(toward(opp));
                }
                Phase::Chase(_) => self.phase = Phase::Home,
                Phase::Home if !me.is_origin() => return Ok(toward(&GeeVertex::origin())),
                Phase::Home => self.phase = Phase::Climb,
            }
            if self.phase == Phase::Climb && !me.is_origin() && !me.nonzero().all(|p| p == 2) {
                self.phase = Phase::Home;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arena::play;
    use crate::strategies::{RandomWalker, ShortestPathCop};

    #[test]
    fn placement_is_beyond_the_cop() {
        let cop = GeeVertex::new(vec![1, 2, 3]).unwrap();
        let mut r = GeeRobber::new();
        let mut rng = crate::arena::actor_rng(0, crate::arena::Actor::Robber);
        let w = r.place(&GeeOracle, Some(&cop), &mut rng).unwrap();
        assert_eq!(w, GeeVertex::unit(5, 2));
        assert!(!GeeOracle.is_near(&cop, &w));
    }

    #[test]
    fn survives_short_runs() {
        for seed in 0..3 {
            let mut r = GeeRobber::new();
            let t = play(&GeeOracle, &mut ClimbCop::new(8), &mut r, 300, seed);
            assert!(!t.captured() && t.is_legal(), "{:?}", t.summary);
            assert!(t.summary.violations.is_empty(), "{:?}", t.summary.violations);
            assert!(r.returns() >= 5);
            assert!(r.stage_two_entries().iter().all(|&b| b >= 6));
            let t = play(&GeeOracle, &mut ShortestPathCop { budget: 8 }, &mut GeeRobber::new(), 300, seed);
            assert!(!t.captured() && t.is_legal() && t.summary.violations.is_empty(), "{:?}", t.summary);
            let t = play(&GeeOracle, &mut RandomWalker::default(), &mut GeeRobber::new(), 300, seed);
            assert!(!t.captured() && t.is_legal() && t.summary.violations.is_empty(), "{:?}", t.summary);
        }
    }
}
