//! Product-style constructions over a finite base graph.

use crate::graph::{FiniteGraph, GraphBuilder, VertexId};

/// `G * P_n`: vertices `(x, j)` for `j` in `0..=n`; `(x, j) ~ (x', j')` when
/// `x ∼ x'` and `|j - j'| ≤ 1` (with `∼` adjacent-or-equal), or `j = j' = n`.
/// Vertex `(x, j)` has id `j * |G| + x`.
pub fn ppath(name: &str, base: &FiniteGraph, n: usize) -> FiniteGraph {
    let size = base.n();
    let id = |x: VertexId, j: usize| j * size + x;
    let mut b = GraphBuilder::new(name);
    for j in 0..=n {
        for x in 0..size {
            b.add_vertex(format!("({},{j})", base.label(x)));
        }
    }
    for j in 0..=n {
        for x in 0..size {
            for x2 in base.closed_set(x).iter() {
                for j2 in j..=(j + 1).min(n) {
                    if (x2, j2) != (x, j) {
                        b.add_edge(id(x, j), id(x2, j2));
                    }
                }
            }
        }
    }
    for x in 0..size {
        for x2 in x + 1..size {
            b.add_edge(id(x, n), id(x2, n));
        }
    }
    b.build().expect("ppath is valid")
}

/// `G · C_4`: vertices `(x, y)` with `y` in `0..4`; `(x, y) ~ (x', y')` when
/// `x = x'` and `y`, `y'` are cycle-adjacent, or `x ~ x'` and `y = y' = 0`.
/// Vertex `(x, y)` has id `4x + y`.
pub fn c4dot(name: &str, base: &FiniteGraph) -> FiniteGraph {
    let id = |x: VertexId, y: usize| 4 * x + y;
    let mut b = GraphBuilder::new(name);
    for x in 0..base.n() {
        for y in 0..4 {
            b.add_vertex(format!("({},{y})", base.label(x)));
        }
    }
    for x in 0..base.n() {
        for y in 0..4 {
            b.add_edge(id(x, y), id(x, (y + 1) % 4));
        }
    }
    for (x, x2) in base.edges() {
        b.add_edge(id(x, 0), id(x2, 0));
    }
    b.build().expect("c4dot is valid")
}

/// Hive graph of a base graph: layers `G × {0..=height}` plus the hive vertex.
#[derive(Clone, Debug)]
pub struct Hive {
    pub graph: FiniteGraph,
    pub hive: VertexId,
    pub base_n: usize,
    pub height: usize,
}

impl Hive {
    /// Id of `(x, i)`.
    pub fn id(&self, x: VertexId, i: usize) -> VertexId {
        x * (self.height + 1) + i
    }

    /// `(x, i)` for a non-hive vertex.
    pub fn coords(&self, v: VertexId) -> Option<(VertexId, usize)> {
        (v != self.hive).then(|| (v / (self.height + 1), v % (self.height + 1)))
    }

    /// Projection onto the base layer; undefined at the hive vertex.
    pub fn hive_map(&self, v: VertexId) -> Option<VertexId> {
        self.coords(v).map(|(x, _)| x)
    }
}

/// `(x, i) ~ (x', i')` when `x ∼ x'` and `|i - i'| ≤ 1`; the hive vertex is
/// joined to the whole top layer.
pub fn hive(name: &str, base: &FiniteGraph, height: usize) -> Hive {
    assert!(height >= 1, "hive height must be at least 1");
    let per = height + 1;
    let id = |x: VertexId, i: usize| x * per + i;
    let mut b = GraphBuilder::new(name);
    for x in 0..base.n() {
        for i in 0..=height {
            b.add_vertex(format!("({},{i})", base.label(x)));
        }
    }
    let hv = b.add_vertex("hive");
    for x in 0..base.n() {
        for i in 0..=height {
            for x2 in base.closed_set(x).iter() {
                for i2 in i..=(i + 1).min(height) {
                    if (x2, i2) != (x, i) {
                        b.add_edge(id(x, i), id(x2, i2));
                    }
                }
            }
        }
        b.add_edge(hv, id(x, height));
    }
    Hive { graph: b.build().expect("hive is valid"), hive: hv, base_n: base.n(), height }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::basic::{cycle, path};

    #[test]
    fn ppath_top_layer_is_clique() {
        let g = ppath("p", &cycle(4), 6);
        assert_eq!(g.n(), 28);
        for a in 24..28 {
            for b in 24..28 {
                assert_eq!(g.is_adjacent(a, b), a != b);
            }
        }
        // vertical edge (x,j)~(x,j+1)
        assert!(g.is_adjacent(0, 4));
    }

    #[test]
    fn hive_of_point_is_path() {
        let h = hive("h", &path(1), 1);
        assert_eq!(h.graph.n(), 3);
        assert_eq!(h.graph.edge_count(), 2);
        assert!(h.graph.is_adjacent(h.id(0, 1), h.hive));
        assert_eq!(h.hive_map(h.hive), None);
    }

    #[test]
    fn c4dot_sizes() {
        let g = c4dot("d", &path(2));
        assert_eq!(g.n(), 8);
        assert_eq!(g.edge_count(), 4 + 4 + 1);
    }
}
