//! Scripted chase on finite K chains with a hub.

use std::collections::BTreeSet;

use rand::RngCore;

use crate::arena::Strategy;
use crate::error::{Error, Result};
use crate::families::Role;
use crate::graph::{FiniteGraph, VertexId};

use super::HasGraph;

/// Chain vertex read back from its label: `(block, role)`, with `y_i`
/// always written as `x_{i+1}`.
fn parse_label(label: &str) -> Option<(i64, Role)> {
    [Role::Zp, Role::Tp, Role::X, Role::Z, Role::T, Role::W]
        .into_iter()
        .find_map(|r| label.strip_prefix(r.name()).and_then(|rest| rest.parse().ok()).map(|i| (i, r)))
}

/// Chain layout recovered from the labels of a `kchain` truncation.
struct Layout {
    hub: VertexId,
    first: i64,
    last: i64,
}

impl Layout {
    fn read(g: &FiniteGraph) -> Result<Self> {
        let mismatch = |reason: &str| Error::Strategy { name: "chain-script".into(), reason: reason.into() };
        let hub = g.id("hub").map_err(|_| mismatch("arena has no hub"))?;
        let blocks: Vec<i64> =
            g.labels().iter().filter_map(|l| parse_label(l)).filter(|(_, r)| *r == Role::W).map(|(i, _)| i).collect();
        let first = *blocks.iter().min().ok_or_else(|| mismatch("arena has no K copies"))?;
        let last = *blocks.iter().max().expect("non-empty");
        Ok(Self { hub, first, last })
    }
}

fn id(g: &FiniteGraph, block: i64, role: Role) -> Option<VertexId> {
    match role {
        Role::Y => g.id(&format!("x{}", block + 1)).ok(),
        r => g.id(&format!("{}{block}", r.name())).ok(),
    }
}

/// Cop that sits on the hub, drops to `y_i` of the robber's copy and then
/// plays `z_i, z'_i, y_i` before following the robber into the next copy
/// leftwards. Each scripted move announces the robber's forced reply set.
#[derive(Default)]
pub struct ChainScriptCop {
    claim: Option<BTreeSet<VertexId>>,
    note: Option<String>,
    violations: Vec<String>,
    scripted: u64,
}

impl ChainScriptCop {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn scripted_moves(&self) -> u64 {
        self.scripted
    }

    /// Safe replies the script predicts after the cop moves to `cop`.
    fn forced_set(g: &FiniteGraph, layout: &Layout, cop: VertexId, robber: VertexId) -> Option<BTreeSet<VertexId>> {
        let (cb, cr) = parse_label(g.label(cop))?;
        let (rb, rr) = parse_label(g.label(robber))?;
        let one = |b, r| id(g, b, r).into_iter().collect::<BTreeSet<_>>();
        match (cr, rr) {
            // cop on y_i = x_{i+1}
            (Role::X, Role::X) if rb == cb - 1 => {
                let i = rb - 1;
                if i < layout.first {
                    Some(BTreeSet::new())
                } else {
                    Some([Role::X, Role::Z, Role::Zp, Role::T, Role::Tp].iter().filter_map(|&r| id(g, i, r)).collect())
                }
            }
            (Role::X, _) if rb == cb - 1 => Some(one(rb, Role::W)),
            (Role::Z, Role::W) if rb == cb => Some(one(rb, Role::Tp)),
            (Role::Zp, Role::Tp) if rb == cb => Some(one(rb, Role::X)),
            _ => None,
        }
    }

    fn scripted_move(g: &FiniteGraph, layout: &Layout, c: VertexId, r: VertexId) -> Option<VertexId> {
        let (rb, rr) = parse_label(g.label(r))?;
        if c == layout.hub {
            return (rr != Role::X).then(|| id(g, rb, Role::Y)).flatten();
        }
        let (cb, cr) = parse_label(g.label(c))?;
        match (cr, rr) {
            (Role::X, Role::W) if rb == cb - 1 => id(g, rb, Role::Z),
            (Role::Z, Role::Tp) if rb == cb => id(g, rb, Role::Zp),
            (Role::Zp, Role::X) if rb == cb => id(g, rb, Role::Y),
            // robber left for the copy on the left: follow to its y
            (Role::X, _) if rb == cb - 2 => id(g, cb - 1, Role::X),
            _ => None,
        }
    }
}

impl<O: HasGraph> Strategy<O> for ChainScriptCop {
    fn name(&self) -> String {
        "chain-script".into()
    }
    fn place(&mut self, oracle: &O, _: Option<&VertexId>, _: &mut dyn RngCore) -> Result<VertexId> {
        Ok(Layout::read(oracle.graph())?.hub)
    }
    fn step(&mut self, oracle: &O, me: &VertexId, opp: &VertexId, _: &mut dyn RngCore) -> Result<VertexId> {
        let g = oracle.graph();
        let layout = Layout::read(g)?;
        if g.is_near(*me, *opp) {
            self.note = Some("capture".into());
            return Ok(*opp);
        }
        let next = match Self::scripted_move(g, &layout, *me, *opp) {
            Some(v) => {
                self.scripted += 1;
                self.claim = Self::forced_set(g, &layout, v, *opp);
                v
            }
            None => {
                self.violations.push(format!(
                    "unscripted position: cop {} robber {} (blocks {}..={})",
                    g.label(*me),
                    g.label(*opp),
                    layout.first,
                    layout.last
                ));
                let d = g.bfs(&[layout.hub]);
                g.neighbors(*me).iter().copied().min_by_key(|&v| (d[v], v)).unwrap_or(*me)
            }
        };
        self.note = Some(format!("to {}", g.label(next)));
        Ok(next)
    }
    fn note(&mut self) -> Option<String> {
        self.note.take()
    }
    fn claim(&mut self) -> Option<BTreeSet<VertexId>> {
        self.claim.take()
    }
    fn violations(&self) -> Vec<String> {
        self.violations.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arena::play;
    use crate::families::make_graph;
    use crate::solver::solve;
    use crate::strategies::SolverRobber;
    use std::sync::Arc;

    #[test]
    fn labels_parse() {
        assert_eq!(parse_label("z'3"), Some((3, Role::Zp)));
        assert_eq!(parse_label("x12"), Some((12, Role::X)));
        assert_eq!(parse_label("hub"), None);
    }

    #[test]
    fn chase_with_claims() {
        let g = make_graph("kchain?blocks=3&hub=true").unwrap();
        let sol = Arc::new(solve(&g, &[]).unwrap());
        assert!(sol.copwin);
        let t = play(&g, &mut ChainScriptCop::new(), &mut SolverRobber { solution: sol }, 200, 0);
        assert!(t.captured(), "{:?}", t.summary);
        assert!(t.summary.violations.is_empty(), "{:?}", t.summary.violations);
        assert!(t.summary.claims_checked >= 3);
        assert_eq!(t.summary.claims_failed, 0);
    }
}
