//! Exact one-cop game solving by retrograde analysis.
//!
//! States are `(cop, robber, mover)`. The cop moves first, both players may
//! stay put, and the game ends as soon as the two positions coincide. Values
//! count the cop moves still needed to capture under optimal play.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::graph::{FiniteGraph, VertexId};

/// Largest state count (`2 · allowed cop vertices · n`) the solver accepts.
pub const STATE_BUDGET: usize = 20_000_000;

const INF: u32 = u32::MAX;

#[derive(Clone, Debug)]
pub struct GameSolution {
    n: usize,
    forbidden: BitSet,
    /// Cop to move, indexed `c * n + r`.
    cop_value: Vec<u32>,
    /// Robber to move, indexed `c * n + r`.
    robber_value: Vec<u32>,
    adj: Vec<Vec<VertexId>>,
    pub copwin: bool,
    pub capture_time: Option<u32>,
    pub cop_start: VertexId,
}

fn finite(v: u32) -> Option<u32> {
    (v != INF).then_some(v)
}

pub fn solve(g: &FiniteGraph, forbidden_cop: &[VertexId]) -> Result<GameSolution> {
    let n = g.n();
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let mut forbidden = BitSet::new(n);
    for &v in forbidden_cop {
        if v >= n {
            return Err(Error::UnknownVertex(v.to_string()));
        }
        forbidden.insert(v);
    }
    let allowed = n - forbidden.count();
    if allowed == 0 {
        return Err(Error::InvalidArgument("forbidden set covers every vertex".into()));
    }
    if 2 * allowed * n > STATE_BUDGET {
        return Err(Error::TooLarge { got: n, limit: (STATE_BUDGET / 2 / n.max(1)).min(n) });
    }
    let blocked = forbidden.clone();
    let ok = |v: VertexId| !blocked.contains(v);
    let closed: Vec<Vec<VertexId>> = (0..n).map(|v| g.closed_set(v).iter().collect()).collect();
    let mut cop_value = vec![INF; n * n];
    let mut robber_value = vec![INF; n * n];
    let mut counter = vec![0u32; n * n];
    // (is_cop_state, cop, robber)
    let mut queue: VecDeque<(bool, VertexId, VertexId)> = VecDeque::new();
    for c in (0..n).filter(|&c| ok(c)) {
        for r in 0..n {
            if r == c {
                continue;
            }
            counter[c * n + r] = closed[r].iter().filter(|&&r2| r2 != c).count() as u32;
            if g.is_adjacent(c, r) && ok(r) {
                cop_value[c * n + r] = 1;
                queue.push_back((true, c, r));
            }
        }
    }
    while let Some((is_cop, c, r)) = queue.pop_front() {
        if is_cop {
            // Cop-to-move (c, r) is final; robber states (c, r0) with r ∈ N[r0] lose an option.
            let v = cop_value[c * n + r];
            for &r0 in &closed[r] {
                if r0 == c || robber_value[c * n + r0] != INF {
                    continue;
                }
                let k = &mut counter[c * n + r0];
                *k -= 1;
                if *k == 0 {
                    robber_value[c * n + r0] = v;
                    queue.push_back((false, c, r0));
                }
            }
        } else {
            let v = robber_value[c * n + r];
            for &c0 in &closed[c] {
                if !ok(c0) || c0 == r || cop_value[c0 * n + r] != INF {
                    continue;
                }
                cop_value[c0 * n + r] = v + 1;
                queue.push_back((true, c0, r));
            }
        }
    }
    let adj = (0..n).map(|v| g.neighbors(v).to_vec()).collect();
    let mut sol = GameSolution {
        n,
        forbidden,
        cop_value,
        robber_value,
        adj,
        copwin: false,
        capture_time: None,
        cop_start: 0,
    };
    let mut best: Option<(u32, VertexId)> = None;
    for c in (0..n).filter(|&c| ok(c)) {
        let worst = sol.placement_value(c);
        if best.map_or(true, |(b, _)| worst < b) {
            best = Some((worst, c));
        }
    }
    let (value, start) = best.expect("some vertex is allowed");
    sol.cop_start = start;
    sol.capture_time = finite(value);
    sol.copwin = sol.capture_time.is_some();
    Ok(sol)
}

impl GameSolution {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_forbidden(&self, v: VertexId) -> bool {
        self.forbidden.contains(v)
    }

    fn check(&self, c: VertexId, r: VertexId) -> Result<()> {
        if c >= self.n || r >= self.n || self.forbidden.contains(c) {
            return Err(Error::InvalidArgument(format!("state ({c}, {r}) is outside the solved arena")));
        }
        Ok(())
    }

    fn closed(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        let mut all = self.adj[v].clone();
        all.push(v);
        all.sort_unstable();
        all.into_iter()
    }

    /// Cop moves to capture with the cop about to move; `Some(0)` when the
    /// positions already coincide.
    pub fn cop_to_move_value(&self, c: VertexId, r: VertexId) -> Option<u32> {
        if c == r {
            Some(0)
        } else {
            finite(self.cop_value[c * self.n + r])
        }
    }

    /// Cop moves to capture with the robber about to move.
    pub fn robber_to_move_value(&self, c: VertexId, r: VertexId) -> Option<u32> {
        if c == r {
            Some(0)
        } else {
            finite(self.robber_value[c * self.n + r])
        }
    }

    fn raw_cop(&self, c: VertexId, r: VertexId) -> u32 {
        if c == r {
            0
        } else {
            self.cop_value[c * self.n + r]
        }
    }

    fn raw_robber(&self, c: VertexId, r: VertexId) -> u32 {
        if c == r {
            0
        } else {
            self.robber_value[c * self.n + r]
        }
    }

    /// Worst case over robber placements once the cop starts at `c`.
    pub fn placement_value(&self, c: VertexId) -> u32 {
        (0..self.n).map(|r| self.raw_cop(c, r)).max().unwrap_or(0)
    }

    /// Optimal cop move, ties to the lowest id.
    pub fn cop_move(&self, c: VertexId, r: VertexId) -> Result<VertexId> {
        self.check(c, r)?;
        Ok(self
            .closed(c)
            .filter(|&c2| !self.forbidden.contains(c2))
            .min_by_key(|&c2| (self.raw_robber(c2, r), c2))
            .expect("staying is allowed"))
    }

    /// Optimal robber move, preferring escape and then the longest delay,
    /// ties to the lowest id.
    pub fn robber_move(&self, c: VertexId, r: VertexId) -> Result<VertexId> {
        self.check(c, r)?;
        Ok(self
            .closed(r)
            .max_by_key(|&r2| (self.raw_cop(c, r2), std::cmp::Reverse(r2)))
            .expect("staying is allowed"))
    }

    /// Optimal robber placement against a cop at `c`.
    pub fn robber_start(&self, c: VertexId) -> Result<VertexId> {
        self.check(c, c)?;
        Ok((0..self.n).max_by_key(|&r| (self.raw_cop(c, r), std::cmp::Reverse(r))).expect("non-empty"))
    }

    pub fn to_json(&self, g: &FiniteGraph, with_policies: bool) -> SolutionJson {
        let label = |v: VertexId| g.label(v).to_string();
        let policies = with_policies.then(|| {
            let mut cop = Vec::new();
            let mut robber = Vec::new();
            for c in (0..self.n).filter(|&c| !self.forbidden.contains(c)) {
                for r in (0..self.n).filter(|&r| r != c) {
                    cop.push(PolicyEntry {
                        cop: label(c),
                        robber: label(r),
                        mover: "cop".into(),
                        value: self.cop_to_move_value(c, r),
                        to: label(self.cop_move(c, r).expect("valid state")),
                    });
                    robber.push(PolicyEntry {
                        cop: label(c),
                        robber: label(r),
                        mover: "robber".into(),
                        value: self.robber_to_move_value(c, r),
                        to: label(self.robber_move(c, r).expect("valid state")),
                    });
                }
            }
            Policies { cop, robber }
        });
        SolutionJson {
            graph: g.name().to_string(),
            copwin: self.copwin,
            capture_time: self.capture_time,
            capture_time_unit: "cop moves".into(),
            cop_start: label(self.cop_start),
            robber_start: label(self.robber_start(self.cop_start).expect("valid start")),
            forbidden_cop: self.forbidden.iter().map(label).collect(),
            policies,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolicyEntry {
    pub cop: String,
    pub robber: String,
    pub mover: String,
    pub value: Option<u32>,
    pub to: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Policies {
    pub cop: Vec<PolicyEntry>,
    pub robber: Vec<PolicyEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionJson {
    pub graph: String,
    pub copwin: bool,
    pub capture_time: Option<u32>,
    pub capture_time_unit: String,
    pub cop_start: String,
    pub robber_start: String,
    pub forbidden_cop: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub policies: Option<Policies>,
}

/// Plays both optimal policies from the optimal placements; returns the
/// capture vertex and the number of cop moves, or `None` within `limit`
/// rounds.
pub fn optimal_playout(sol: &GameSolution, limit: usize) -> Result<Option<(VertexId, usize)>> {
    let mut c = sol.cop_start;
    let mut r = sol.robber_start(c)?;
    if c == r {
        return Ok(Some((c, 0)));
    }
    for moves in 1..=limit {
        c = sol.cop_move(c, r)?;
        if c == r {
            return Ok(Some((c, moves)));
        }
        r = sol.robber_move(c, r)?;
        if c == r {
            return Ok(Some((c, moves)));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::basic::{complete, cycle, path};

    #[test]
    fn small_verdicts() {
        let e = solve(&path(2), &[]).unwrap();
        assert!(e.copwin);
        assert_eq!(e.capture_time, Some(1));
        let p = solve(&path(1), &[]).unwrap();
        assert_eq!(p.capture_time, Some(0));
        assert!(!solve(&cycle(4), &[]).unwrap().copwin);
        assert_eq!(solve(&complete(5), &[]).unwrap().capture_time, Some(1));
        assert_eq!(solve(&path(5), &[]).unwrap().capture_time, Some(2));
    }

    #[test]
    fn forbidding_changes_the_game() {
        // Cop may not use the middle of a 3-path; from an end the robber
        // sits on the other end forever.
        let s = solve(&path(3), &[1]).unwrap();
        assert!(!s.copwin);
        assert!(solve(&path(3), &[0, 1, 2]).is_err());
    }

    #[test]
    fn bellman_relation_holds() {
        let g = path(6);
        let s = solve(&g, &[]).unwrap();
        for c in 0..6 {
            for r in 0..6 {
                if c == r {
                    continue;
                }
                let best = g.closed_set(c).iter().map(|c2| s.raw_robber(c2, r)).min().unwrap();
                assert_eq!(s.raw_cop(c, r), best.saturating_add(1).min(INF));
                let worst = g.closed_set(r).iter().map(|r2| s.raw_cop(c, r2)).max().unwrap();
                assert_eq!(s.raw_robber(c, r), worst);
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let g = path(3);
        let s = solve(&g, &[]).unwrap();
        let doc = s.to_json(&g, true);
        let back: SolutionJson = serde_json::from_str(&serde_json::to_string(&doc).unwrap()).unwrap();
        assert_eq!(back, doc);
        assert_eq!(back.policies.unwrap().cop.len(), 6);
    }
}
