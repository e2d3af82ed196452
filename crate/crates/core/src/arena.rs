//! Referee loop for one cop against one robber, with JSONL transcripts.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, Write};

use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::NeighborOracle;

pub const TRANSCRIPT_FORMAT: &str = "pursuit-transcript-v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Actor {
    Cop,
    Robber,
}

/// A player. Strategies see the oracle and both current positions and keep
/// whatever memory they declare.
pub trait Strategy<O: NeighborOracle> {
    /// Spec string that rebuilds this strategy.
    fn name(&self) -> String;

    /// Starting vertex; the robber sees the cop's start.
    fn place(&mut self, oracle: &O, opponent: Option<&O::Vertex>, rng: &mut dyn RngCore) -> Result<O::Vertex>;

    fn step(&mut self, oracle: &O, me: &O::Vertex, opponent: &O::Vertex, rng: &mut dyn RngCore) -> Result<O::Vertex>;

    /// Annotation for the move just made (stage, memory).
    fn note(&mut self) -> Option<String> {
        None
    }

    /// Cop only: the robber's safe replies this strategy claims to have
    /// forced with its last move.
    fn claim(&mut self) -> Option<BTreeSet<O::Vertex>> {
        None
    }

    /// Internal invariant failures observed so far.
    fn violations(&self) -> Vec<String> {
        Vec::new()
    }

    /// Set when the strategy left its intended regime (fallback moves).
    fn contaminated(&self) -> bool {
        false
    }
}

impl<O: NeighborOracle, S: Strategy<O> + ?Sized> Strategy<O> for Box<S> {
    fn name(&self) -> String {
        (**self).name()
    }
    fn place(&mut self, oracle: &O, opponent: Option<&O::Vertex>, rng: &mut dyn RngCore) -> Result<O::Vertex> {
        (**self).place(oracle, opponent, rng)
    }
    fn step(&mut self, oracle: &O, me: &O::Vertex, opponent: &O::Vertex, rng: &mut dyn RngCore) -> Result<O::Vertex> {
        (**self).step(oracle, me, opponent, rng)
    }
    fn note(&mut self) -> Option<String> {
        (**self).note()
    }
    fn claim(&mut self) -> Option<BTreeSet<O::Vertex>> {
        (**self).claim()
    }
    fn violations(&self) -> Vec<String> {
        (**self).violations()
    }
    fn contaminated(&self) -> bool {
        (**self).contaminated()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Header {
    pub format: String,
    pub graph: String,
    pub cop: String,
    pub robber: String,
    pub seed: u64,
    pub horizon: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Event {
    /// 0 for placements, then the round number.
    pub turn: u64,
    pub actor: Actor,
    pub key: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub coord: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
    /// Whether a claimed forced reply set matched the real one.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub claim_ok: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Outcome {
    Capture { turn: u64 },
    Horizon,
    Illegal { actor: Actor, turn: u64, reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub outcome: Outcome,
    pub contaminated: bool,
    pub violations: Vec<String>,
    pub claims_checked: u64,
    pub claims_failed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transcript {
    pub header: Header,
    pub events: Vec<Event>,
    pub summary: Summary,
}

impl Transcript {
    pub fn captured(&self) -> bool {
        matches!(self.summary.outcome, Outcome::Capture { .. })
    }

    pub fn is_legal(&self) -> bool {
        !matches!(self.summary.outcome, Outcome::Illegal { .. })
    }

    pub fn capture_turn(&self) -> Option<u64> {
        match self.summary.outcome {
            Outcome::Capture { turn } => Some(turn),
            _ => None,
        }
    }

    /// Robber positions in order, placement first.
    pub fn robber_keys(&self) -> impl Iterator<Item = (&u64, &str)> {
        self.events.iter().filter(|e| e.actor == Actor::Robber).map(|e| (&e.turn, e.key.as_str()))
    }

    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<()> {
        serde_json::to_writer(&mut w, &self.header)?;
        w.write_all(b"\n")?;
        for e in &self.events {
            serde_json::to_writer(&mut w, e)?;
            w.write_all(b"\n")?;
        }
        serde_json::to_writer(&mut w, &self.summary)?;
        w.write_all(b"\n")?;
        Ok(())
    }

    pub fn to_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("json is utf-8")
    }

    pub fn read_jsonl<R: BufRead>(r: R) -> Result<Self> {
        let lines: Vec<String> = r.lines().collect::<std::io::Result<_>>()?;
        let lines: Vec<&String> = lines.iter().filter(|l| !l.trim().is_empty()).collect();
        if lines.len() < 2 {
            return Err(Error::Transcript("need a header and an outcome line".into()));
        }
        let header: Header = serde_json::from_str(lines[0])?;
        if header.format != TRANSCRIPT_FORMAT {
            return Err(Error::Transcript(format!("unknown format tag `{}`", header.format)));
        }
        let summary: Summary = serde_json::from_str(lines[lines.len() - 1])?;
        let events = lines[1..lines.len() - 1]
            .iter()
            .map(|l| serde_json::from_str(l).map_err(Error::from))
            .collect::<Result<_>>()?;
        Ok(Self { header, events, summary })
    }

    pub fn from_jsonl_str(s: &str) -> Result<Self> {
        Self::read_jsonl(s.as_bytes())
    }
}

/// Independent generator streams for the two actors, both derived from the
/// header seed.
pub fn actor_rng(seed: u64, actor: Actor) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(match actor {
        Actor::Cop => 1,
        Actor::Robber => 2,
    });
    rng
}

/// Robber replies that are not adjacent to or equal to the cop's vertex.
/// Needs a locally finite oracle.
pub fn safe_replies<O: NeighborOracle>(oracle: &O, cop: &O::Vertex, robber: &O::Vertex) -> BTreeSet<O::Vertex> {
    let mut options = oracle.neighbors(robber);
    options.push(robber.clone());
    options.into_iter().filter(|w| !oracle.is_near(cop, w)).collect()
}

pub fn play<O, C, R>(oracle: &O, cop: &mut C, robber: &mut R, horizon: u64, seed: u64) -> Transcript
where
    O: NeighborOracle,
    C: Strategy<O> + ?Sized,
    R: Strategy<O> + ?Sized,
{
    let header = Header {
        format: TRANSCRIPT_FORMAT.to_string(),
        graph: oracle.spec(),
        cop: cop.name(),
        robber: robber.name(),
        seed,
        horizon,
    };
    let mut cop_rng = actor_rng(seed, Actor::Cop);
    let mut rob_rng = actor_rng(seed, Actor::Robber);
    let mut events = Vec::new();
    let mut claims_checked = 0;
    let mut claims_failed = 0;
    let event = |turn, actor, v: &O::Vertex, note, claim_ok| Event {
        turn,
        actor,
        key: oracle.key(v),
        coord: oracle.potential(v),
        note,
        claim_ok,
    };
    let illegal = |actor, turn, reason: String| Outcome::Illegal { actor, turn, reason };

    let outcome = 'game: {
        let c0 = match cop.place(oracle, None, &mut cop_rng) {
            Ok(v) if oracle.contains(&v) => v,
            Ok(v) => break 'game illegal(Actor::Cop, 0, format!("placed outside the graph: {v:?}")),
            Err(e) => break 'game illegal(Actor::Cop, 0, e.to_string()),
        };
        events.push(event(0, Actor::Cop, &c0, cop.note(), None));
        let r0 = match robber.place(oracle, Some(&c0), &mut rob_rng) {
            Ok(v) if oracle.contains(&v) => v,
            Ok(v) => break 'game illegal(Actor::Robber, 0, format!("placed outside the graph: {v:?}")),
            Err(e) => break 'game illegal(Actor::Robber, 0, e.to_string()),
        };
        events.push(event(0, Actor::Robber, &r0, robber.note(), None));
        if c0 == r0 {
            break 'game Outcome::Capture { turn: 0 };
        }
        let (mut c, mut r) = (c0, r0);
        for turn in 1..=horizon {
            let c2 = match cop.step(oracle, &c, &r, &mut cop_rng) {
                Ok(v) => v,
                Err(e) => break 'game illegal(Actor::Cop, turn, e.to_string()),
            };
            if !oracle.contains(&c2) || !oracle.is_near(&c, &c2) {
                break 'game illegal(Actor::Cop, turn, format!("{} is not a legal move from {}", oracle.key(&c2), oracle.key(&c)));
            }
            let claim_ok = cop.claim().map(|claimed| {
                claims_checked += 1;
                let ok = c2 == r || claimed == safe_replies(oracle, &c2, &r);
                if !ok {
                    claims_failed += 1;
                }
                ok
            });
            events.push(event(turn, Actor::Cop, &c2, cop.note(), claim_ok));
            c = c2;
            if c == r {
                break 'game Outcome::Capture { turn };
            }
            let r2 = match robber.step(oracle, &r, &c, &mut rob_rng) {
                Ok(v) => v,
                Err(e) => break 'game illegal(Actor::Robber, turn, e.to_string()),
            };
            if !oracle.contains(&r2) || !oracle.is_near(&r, &r2) {
                break 'game illegal(Actor::Robber, turn, format!("{} is not a legal move from {}", oracle.key(&r2), oracle.key(&r)));
            }
            events.push(event(turn, Actor::Robber, &r2, robber.note(), None));
            r = r2;
            if c == r {
                break 'game Outcome::Capture { turn };
            }
        }
        Outcome::Horizon
    };
    let mut violations = cop.violations();
    violations.extend(robber.violations());
    Transcript {
        header,
        events,
        summary: Summary {
            outcome,
            contaminated: cop.contaminated() || robber.contaminated(),
            violations,
            claims_checked,
            claims_failed,
        },
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkStats {
    pub visits: u64,
    pub last_visit: Option<u64>,
    /// Largest number of rounds between consecutive visits.
    pub max_gap: Option<u64>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metrics {
    pub rounds: u64,
    pub captured: bool,
    pub marks: BTreeMap<String, MarkStats>,
    pub distinct_robber_vertices: usize,
    pub robber_coord_max: Option<i64>,
    pub robber_coord_final: Option<i64>,
    pub cop_coord_max: Option<i64>,
}

/// Visit statistics for the robber on `marks`, plus family-coordinate drift.
pub fn analyze(t: &Transcript, marks: &[String]) -> Metrics {
    let mut m = Metrics {
        rounds: t.events.iter().map(|e| e.turn).max().unwrap_or(0),
        captured: t.captured(),
        ..Default::default()
    };
    for k in marks {
        m.marks.insert(k.clone(), MarkStats::default());
    }
    let mut seen = BTreeSet::new();
    for e in &t.events {
        match e.actor {
            Actor::Cop => {
                m.cop_coord_max = m.cop_coord_max.max(e.coord);
            }
            Actor::Robber => {
                seen.insert(e.key.as_str());
                m.robber_coord_max = m.robber_coord_max.max(e.coord);
                m.robber_coord_final = e.coord;
                if let Some(s) = m.marks.get_mut(&e.key) {
                    if let Some(last) = s.last_visit {
                        let gap = e.turn - last;
                        s.max_gap = Some(s.max_gap.map_or(gap, |g| g.max(gap)));
                    }
                    s.visits += 1;
                    s.last_visit = Some(e.turn);
                }
            }
        }
    }
    m.distinct_robber_vertices = seen.len();
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::basic::{cycle, path};
    use crate::graph::FiniteGraph;

    struct Fixed(Vec<usize>, usize);

    impl Strategy<FiniteGraph> for Fixed {
        fn name(&self) -> String {
            "fixed".into()
        }
        fn place(&mut self, _: &FiniteGraph, _: Option<&usize>, _: &mut dyn RngCore) -> Result<usize> {
            Ok(self.0[0])
        }
        fn step(&mut self, _: &FiniteGraph, _: &usize, _: &usize, _: &mut dyn RngCore) -> Result<usize> {
            self.1 += 1;
            Ok(self.0[self.1.min(self.0.len() - 1)])
        }
    }

    #[test]
    fn walk_captures_stationary_robber() {
        let g = path(3);
        let t = play(&g, &mut Fixed(vec![0, 1, 2], 0), &mut Fixed(vec![2], 0), 10, 7);
        assert_eq!(t.capture_turn(), Some(2));
        assert_eq!(t.events.len(), 5);
        let back = Transcript::from_jsonl_str(&t.to_jsonl()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn illegal_jump_is_reported() {
        let g = cycle(5);
        let t = play(&g, &mut Fixed(vec![0, 2], 0), &mut Fixed(vec![3], 0), 10, 1);
        assert_eq!(t.summary.outcome, Outcome::Illegal { actor: Actor::Cop, turn: 1, reason: "2 is not a legal move from 0".into() });
    }

    #[test]
    fn mark_gaps() {
        let g = cycle(5);
        let t = play(&g, &mut Fixed(vec![0], 0), &mut Fixed(vec![2, 3, 2, 3, 3, 2], 0), 6, 1);
        let m = analyze(&t, &["2".to_string()]);
        let s = &m.marks["2"];
        assert_eq!(s.visits, 4);
        assert_eq!(s.max_gap, Some(3));
        assert!(!m.captured);
    }
}
