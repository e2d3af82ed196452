//! Graph family generators addressed by spec strings.

pub mod chain;
pub mod gee;
pub mod hgraph;
pub mod product;
pub mod spec;

pub use chain::{extend_with_k, k, two_k, ChainVertex, KChainOracle, Role};
pub use gee::{GeeOracle, GeeVertex};
pub use hgraph::{HGraph, HVertex};
pub use spec::FamilySpec;

use crate::error::{Error, Result};
use crate::graph::{basic, FiniteGraph, VertexId};

/// A finite graph, with the vertices that have neighbors outside it when it
/// truncates an infinite family.
#[derive(Clone, Debug)]
pub struct Truncation {
    pub graph: FiniteGraph,
    pub boundary: Vec<VertexId>,
}

impl Truncation {
    fn closed(graph: FiniteGraph) -> Self {
        Self { graph, boundary: Vec::new() }
    }
}

#[derive(Debug)]
pub enum Family {
    Finite(Truncation),
    Chain(KChainOracle),
    Gee(GeeOracle),
    H(HGraph),
}

impl Family {
    pub fn into_finite(self, spec: &str) -> Result<Truncation> {
        match self {
            Family::Finite(t) => Ok(t),
            _ => Err(Error::InfiniteFamily(spec.to_string())),
        }
    }
}

pub fn make_str(spec: &str) -> Result<Family> {
    make(&FamilySpec::parse(spec)?)
}

/// Finite graph named by `spec`; infinite families need a truncation
/// parameter.
pub fn make_graph(spec: &str) -> Result<FiniteGraph> {
    Ok(make_str(spec)?.into_finite(spec)?.graph)
}

pub fn make(spec: &FamilySpec) -> Result<Family> {
    let name = spec.to_string();
    let positive = |key: &str| -> Result<usize> {
        let v = spec.required_usize(key)?;
        if v == 0 {
            return Err(spec.range_error(format!("`{key}` must be at least 1")));
        }
        Ok(v)
    };
    let finite = |g: FiniteGraph| Ok(Family::Finite(Truncation::closed(g.with_name(name.clone()))));
    match spec.name.as_str() {
        "K" => {
            spec.expect_keys(&[])?;
            finite(k())
        }
        "two_k" => {
            spec.expect_keys(&[])?;
            finite(two_k())
        }
        "kchain" => {
            spec.expect_keys(&["blocks", "hub", "direction"])?;
            let two_way = match spec.value("direction")?.unwrap_or("one") {
                "one" => false,
                "two" => true,
                _ => return Err(spec.range_error("`direction` must be one or two")),
            };
            let hub = spec.bool("hub", false)?;
            match spec.usize("blocks")? {
                Some(0) => Err(spec.range_error("`blocks` must be at least 1")),
                Some(b) => {
                    let c = chain::kchain(&name, b, hub, two_way)?;
                    Ok(Family::Finite(Truncation { graph: c.graph, boundary: c.boundary }))
                }
                None if hub => Err(spec.range_error("the hub has infinite degree; give `blocks`")),
                None => Ok(Family::Chain(KChainOracle { two_way })),
            }
        }
        "omega1" => {
            spec.expect_keys(&["blocks"])?;
            let o = chain::omega1(&name, positive("blocks")?)?;
            Ok(Family::Finite(Truncation { boundary: vec![o.a, o.b], graph: o.graph }))
        }
        "ppath" => {
            spec.expect_keys(&["base", "n"])?;
            let base = make(spec.base("base")?)?.into_finite(&name)?;
            let g = product::ppath(&name, &base.graph, positive("n")?);
            Ok(Family::Finite(Truncation::closed(g)))
        }
        "c4dot" => {
            spec.expect_keys(&["base"])?;
            let base = make(spec.base("base")?)?.into_finite(&name)?;
            Ok(Family::Finite(Truncation::closed(product::c4dot(&name, &base.graph))))
        }
        "hive" => {
            spec.expect_keys(&["base", "height"])?;
            let base = make(spec.base("base")?)?.into_finite(&name)?;
            let h = product::hive(&name, &base.graph, positive("height")?);
            Ok(Family::Finite(Truncation::closed(h.graph)))
        }
        "gee" => {
            spec.expect_keys(&["stage"])?;
            match spec.usize("stage")? {
                None => Ok(Family::Gee(GeeOracle)),
                Some(s) => {
                    let (graph, _) = gee::stage_graph(&name, s).map_err(|e| spec.range_error(e.to_string()))?;
                    let boundary = (0..graph.n()).collect();
                    Ok(Family::Finite(Truncation { graph, boundary }))
                }
            }
        }
        "hgraph" => {
            spec.expect_keys(&["levels"])?;
            let h = HGraph::new();
            match spec.usize("levels")? {
                None => Ok(Family::H(h)),
                Some(l) if l as u32 > hgraph::MAX_LEVELS => {
                    Err(spec.range_error(format!("`levels` must be at most {}", hgraph::MAX_LEVELS)))
                }
                Some(l) => {
                    let m = crate::oracle::materialize_set(&h, h.truncation_vertices(l as u32))?;
                    let boundary = (0..m.graph.n()).filter(|&i| m.vertices[i].level == l as u32).collect();
                    Ok(Family::Finite(Truncation { graph: m.graph.with_name(name), boundary }))
                }
            }
        }
        "path" => {
            spec.expect_keys(&["n"])?;
            finite(basic::path(positive("n")?))
        }
        "cycle" => {
            spec.expect_keys(&["n"])?;
            let n = spec.required_usize("n")?;
            if n < 3 {
                return Err(spec.range_error("`n` must be at least 3"));
            }
            finite(basic::cycle(n))
        }
        other => Err(spec.range_error(format!("unknown family `{other}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_by_spec() {
        for (s, n) in [
            ("K", 7),
            ("two_k", 13),
            ("kchain?blocks=3&hub=true", 20),
            ("omega1?blocks=2", 16),
            ("ppath?base={cycle?n=4}&n=6", 28),
            ("hive?base={path?n=1}&height=1", 3),
            ("gee?stage=2", 28),
            ("hgraph?levels=2", 395),
        ] {
            let g = make_graph(s).unwrap();
            assert_eq!(g.n(), n, "{s}");
            assert_eq!(g.name(), FamilySpec::parse(s).unwrap().to_string());
        }
    }

    #[test]
    fn infinite_and_invalid_specs() {
        assert!(matches!(make_graph("gee"), Err(Error::InfiniteFamily(_))));
        assert!(matches!(make_str("kchain"), Ok(Family::Chain(_))));
        for bad in ["kchain?blocks=0", "kchain?hub=true", "hive?base={K}&height=0", "cycle?n=2", "nope", "K?x=1"] {
            assert!(make_str(bad).is_err(), "{bad}");
        }
    }
}
