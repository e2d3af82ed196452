//! Arenas and strategies built from spec strings, and seeded runs between
//! them that replay from a transcript header.

use std::sync::Arc;

use crate::arena::{play, Header, Strategy, Transcript};
use crate::constructibility::dismantle;
use crate::error::{Error, Result};
use crate::families::{self, Family, FamilySpec, GeeOracle, HGraph, KChainOracle};
use crate::graph::FiniteGraph;
use crate::oracle::{CertifiedGraph, NeighborOracle};
use crate::solver::{solve, GameSolution};
use crate::strategies::{
    ChainScriptCop, ClimbCop, ConsistentCop, FiniteShadow, GeeRobber, HRobber, HasGraph, HiveClimbCop, KEscapeRobber,
    RandomWalker, ShadowRobber, ShortestPathCop, SolverCop, SolverRobber, TrailCop,
};

pub const DEFAULT_SP_BUDGET: usize = 64;
pub const DEFAULT_CLIMB_CHASE: u32 = 8;
pub const DEFAULT_HIVE_CHASE: u32 = 4;
pub const DEFAULT_HIVE_TOP: u32 = 3;
/// Level cap given to random walkers on ℋ when none is named; vertex degree
/// grows exponentially with the level.
pub const DEFAULT_H_RANDOM_CAP: i64 = 3;

/// Cop adversaries every staged robber is run against.
pub const GEE_COPS: [&str; 3] = ["climb?chase=8", "shortest-path?budget=64", "random"];
pub const H_COPS: [&str; 3] = ["hive-climb?chase=4&top=3", "shortest-path?budget=64", "random?cap=3"];

/// Where a game is played.
#[derive(Debug)]
pub enum Arena {
    Finite(FiniteGraph),
    Chain(KChainOracle),
    Gee(GeeOracle),
    H(HGraph),
}

impl Arena {
    pub fn from_spec(spec: &str) -> Result<Self> {
        Ok(match families::make_str(spec)? {
            Family::Finite(t) => Arena::Finite(t.graph),
            Family::Chain(o) => Arena::Chain(o),
            Family::Gee(o) => Arena::Gee(o),
            Family::H(o) => Arena::H(o),
        })
    }

    pub fn spec(&self) -> String {
        match self {
            Arena::Finite(g) => g.spec(),
            Arena::Chain(o) => o.spec(),
            Arena::Gee(o) => o.spec(),
            Arena::H(o) => o.spec(),
        }
    }
}

type Boxed<O> = Box<dyn Strategy<O>>;

fn parse(spec: &str) -> Result<FamilySpec> {
    FamilySpec::parse(spec)
}

fn unknown(role: &str, spec: &FamilySpec, arena: &str) -> Error {
    Error::InvalidArgument(format!("{role} strategy `{spec}` is not available on {arena}"))
}

fn u32_param(s: &FamilySpec, key: &str, default: u32) -> Result<u32> {
    match s.usize(key)? {
        None => Ok(default),
        Some(v) => u32::try_from(v).map_err(|_| s.range_error(format!("`{key}` is too large"))),
    }
}

fn random(s: &FamilySpec, default_cap: Option<i64>) -> Result<RandomWalker> {
    s.expect_keys(&["cap"])?;
    let cap = match s.usize("cap")? {
        Some(c) => Some(i64::try_from(c).map_err(|_| s.range_error("`cap` is too large"))?),
        None => default_cap,
    };
    Ok(RandomWalker { cap })
}

fn shortest_path(s: &FamilySpec) -> Result<ShortestPathCop> {
    s.expect_keys(&["budget"])?;
    Ok(ShortestPathCop { budget: s.usize("budget")?.unwrap_or(DEFAULT_SP_BUDGET).max(1) })
}

/// Cops and robbers shared by every arena.
fn generic_cop<O: NeighborOracle + 'static>(s: &FamilySpec, cap: Option<i64>) -> Result<Option<Boxed<O>>> {
    Ok(match s.name.as_str() {
        "random" => Some(Box::new(random(s, cap)?)),
        "shortest-path" => Some(Box::new(shortest_path(s)?)),
        "consistent" => {
            s.expect_keys(&[])?;
            Some(Box::new(ConsistentCop::new()))
        }
        _ => None,
    })
}

fn generic_robber<O: NeighborOracle + 'static>(s: &FamilySpec, cap: Option<i64>) -> Result<Option<Boxed<O>>> {
    Ok(match s.name.as_str() {
        "random" => Some(Box::new(random(s, cap)?)),
        "shadow" => {
            s.expect_keys(&[])?;
            Some(Box::new(ShadowRobber::default()))
        }
        _ => None,
    })
}

/// Lazily solved game on a finite arena, shared by solver-backed players.
struct Solved<'a> {
    graph: &'a FiniteGraph,
    solution: Option<Arc<GameSolution>>,
}

impl Solved<'_> {
    fn get(&mut self) -> Result<Arc<GameSolution>> {
        if self.solution.is_none() {
            self.solution = Some(Arc::new(solve(self.graph, &[])?));
        }
        Ok(self.solution.clone().expect("just set"))
    }
}

fn finite_cop<O: HasGraph + 'static>(s: &FamilySpec, solved: &mut Solved) -> Result<Boxed<O>> {
    match s.name.as_str() {
        "solver" => {
            s.expect_keys(&[])?;
            Ok(Box::new(SolverCop { solution: solved.get()? }))
        }
        "chain-script" => {
            s.expect_keys(&[])?;
            Ok(Box::new(ChainScriptCop::new()))
        }
        _ => generic_cop(s, None)?.ok_or_else(|| unknown("cop", s, "a finite graph")),
    }
}

fn finite_robber<O: HasGraph + 'static>(s: &FamilySpec, solved: &mut Solved) -> Result<Boxed<O>> {
    match s.name.as_str() {
        "solver" => {
            s.expect_keys(&[])?;
            Ok(Box::new(SolverRobber { solution: solved.get()? }))
        }
        "shadow" => {
            s.expect_keys(&[])?;
            Ok(Box::new(FiniteShadow))
        }
        "k-escape" => {
            s.expect_keys(&[])?;
            Ok(Box::new(KEscapeRobber::default()))
        }
        _ => generic_robber(s, None)?.ok_or_else(|| unknown("robber", s, "a finite graph")),
    }
}

/// Plays `cop` against `robber` on `arena`. Strategy specs use the family
/// spec grammar, e.g. `shortest-path?budget=32`.
pub fn simulate(arena: &Arena, cop: &str, robber: &str, horizon: u64, seed: u64) -> Result<Transcript> {
    let (c, r) = (parse(cop)?, parse(robber)?);
    match arena {
        Arena::Finite(g) => {
            let mut solved = Solved { graph: g, solution: None };
            if matches!(c.name.as_str(), "trail" | "consistent") {
                c.expect_keys(&[])?;
                let d = dismantle(g)?;
                let cert = d.certificate().ok_or_else(|| {
                    Error::InvalidArgument(format!("`{}` needs a constructible graph; {} is not", c.name, g.name()))
                })?;
                let cg = CertifiedGraph::new(g.clone(), cert)?;
                let mut cop: Boxed<CertifiedGraph> =
                    if c.name == "trail" { Box::new(TrailCop::new()) } else { Box::new(ConsistentCop::new()) };
                let mut rob = finite_robber::<CertifiedGraph>(&r, &mut solved)?;
                return Ok(play(&cg, &mut cop, &mut rob, horizon, seed));
            }
            let mut cop = finite_cop::<FiniteGraph>(&c, &mut solved)?;
            let mut rob = finite_robber::<FiniteGraph>(&r, &mut solved)?;
            Ok(play(g, &mut cop, &mut rob, horizon, seed))
        }
        Arena::Chain(o) => {
            let mut cop = generic_cop::<KChainOracle>(&c, None)?.ok_or_else(|| unknown("cop", &c, "kchain"))?;
            let mut rob = generic_robber::<KChainOracle>(&r, None)?.ok_or_else(|| unknown("robber", &r, "kchain"))?;
            Ok(play(o, &mut cop, &mut rob, horizon, seed))
        }
        Arena::Gee(o) => {
            let mut cop: Boxed<GeeOracle> = match c.name.as_str() {
                "climb" => {
                    c.expect_keys(&["chase"])?;
                    Box::new(ClimbCop::new(u32_param(&c, "chase", DEFAULT_CLIMB_CHASE)?))
                }
                _ => generic_cop(&c, None)?.ok_or_else(|| unknown("cop", &c, "gee"))?,
            };
            let mut rob: Boxed<GeeOracle> = match r.name.as_str() {
                "gee" => {
                    r.expect_keys(&[])?;
                    Box::new(GeeRobber::new())
                }
                _ => generic_robber(&r, None)?.ok_or_else(|| unknown("robber", &r, "gee"))?,
            };
            Ok(play(o, &mut cop, &mut rob, horizon, seed))
        }
        Arena::H(o) => {
            let cap = Some(DEFAULT_H_RANDOM_CAP);
            let mut cop: Boxed<HGraph> = match c.name.as_str() {
                "hive-climb" => {
                    c.expect_keys(&["chase", "top"])?;
                    Box::new(HiveClimbCop::new(
                        u32_param(&c, "top", DEFAULT_HIVE_TOP)?,
                        u32_param(&c, "chase", DEFAULT_HIVE_CHASE)?,
                    ))
                }
                _ => generic_cop(&c, cap)?.ok_or_else(|| unknown("cop", &c, "hgraph"))?,
            };
            let mut rob: Boxed<HGraph> = match r.name.as_str() {
                "hgraph" => {
                    r.expect_keys(&[])?;
                    Box::new(HRobber::new())
                }
                _ => generic_robber(&r, cap)?.ok_or_else(|| unknown("robber", &r, "hgraph"))?,
            };
            Ok(play(o, &mut cop, &mut rob, horizon, seed))
        }
    }
}

/// Reruns the game a transcript header describes.
pub fn replay(arena: &Arena, header: &Header) -> Result<Transcript> {
    if header.graph != arena.spec() {
        return Err(Error::Transcript(format!("header names graph `{}`, arena is `{}`", header.graph, arena.spec())));
    }
    simulate(arena, &header.cop, &header.robber, header.horizon, header.seed)
}

/// Reruns a transcript whose header names a family spec.
pub fn replay_from_spec(header: &Header) -> Result<Transcript> {
    replay(&Arena::from_spec(&header.graph)?, header)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip_through_headers() {
        let cases = [
            ("K", "solver", "k-escape"),
            ("two_k", "trail", "random"),
            ("path?n=6", "shortest-path?budget=5", "shadow"),
            ("kchain?blocks=2&hub=true", "chain-script", "solver"),
            ("gee", "climb?chase=3", "gee"),
            ("hgraph", "random", "hgraph"),
            ("kchain", "consistent", "random"),
        ];
        for (g, c, r) in cases {
            let arena = Arena::from_spec(g).unwrap();
            let t = simulate(&arena, c, r, 30, 7).unwrap();
            let again = replay_from_spec(&t.header).unwrap();
            assert_eq!(t, again, "{g} {c} {r}");
        }
    }

    #[test]
    fn rejects_mismatched_strategies() {
        let gee = Arena::from_spec("gee").unwrap();
        assert!(simulate(&gee, "chain-script", "gee", 5, 0).is_err());
        assert!(simulate(&gee, "climb", "hgraph", 5, 0).is_err());
        let c4 = Arena::from_spec("cycle?n=4").unwrap();
        assert!(simulate(&c4, "trail", "random", 5, 0).is_err());
        assert!(simulate(&c4, "random?bogus=1", "random", 5, 0).is_err());
    }

    #[test]
    fn random_walkers_on_h_get_a_level_cap() {
        let t = simulate(&Arena::from_spec("hgraph").unwrap(), "random", "hgraph", 5, 0).unwrap();
        assert_eq!(t.header.cop, "random?cap=3");
    }
}
