//! Exhaustive enumeration of small connected graphs as edge bitmasks.

use std::collections::BTreeSet;

use crate::graph::FiniteGraph;

/// Largest order enumerated; bit `b` of a mask is the `b`-th vertex pair.
pub const MAX_ORDER: usize = 6;

/// Vertex pairs `(i, j)` with `i < j`, in mask bit order.
pub fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|j| (0..j).map(move |i| (i, j))).collect()
}

fn adjacency(n: usize, mask: u32) -> Vec<u32> {
    let mut adj = vec![0u32; n];
    for (b, (i, j)) in pairs(n).into_iter().enumerate() {
        if mask >> b & 1 == 1 {
            adj[i] |= 1 << j;
            adj[j] |= 1 << i;
        }
    }
    adj
}

pub fn mask_is_connected(n: usize, mask: u32) -> bool {
    if n == 0 {
        return false;
    }
    let adj = adjacency(n, mask);
    let mut seen = 1u32;
    let mut frontier = 1u32;
    while frontier != 0 {
        let v = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        let fresh = adj[v] & !seen;
        seen |= fresh;
        frontier |= fresh;
    }
    seen.count_ones() as usize == n
}

pub fn mask_graph(n: usize, mask: u32) -> FiniteGraph {
    let edges = pairs(n).into_iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, e)| e);
    FiniteGraph::unlabeled(format!("g{n}_{mask}"), n, edges).expect("valid pairs")
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for slot in 0..n {
            let mut q = p.clone();
            q.insert(slot, n - 1);
            out.push(q);
        }
    }
    out
}

/// Smallest mask over all relabelings; equal exactly for isomorphic graphs.
pub fn canonical_mask(n: usize, mask: u32, perms: &[Vec<usize>]) -> u32 {
    let pairs = pairs(n);
    let index = |i: usize, j: usize| {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        b * (b - 1) / 2 + a
    };
    perms
        .iter()
        .map(|p| {
            pairs
                .iter()
                .enumerate()
                .filter(|(b, _)| mask >> b & 1 == 1)
                .fold(0u32, |acc, (_, &(i, j))| acc | 1 << index(p[i], p[j]))
        })
        .min()
        .expect("at least one permutation")
}

/// Edge masks of every labeled connected graph on `n` vertices.
pub fn labeled_connected(n: usize) -> Vec<u32> {
    assert!((1..=MAX_ORDER).contains(&n), "order must be in 1..={MAX_ORDER}");
    let m = n * (n - 1) / 2;
    (0..1u32 << m).filter(|&mask| mask_is_connected(n, mask)).collect()
}

/// One canonical mask per isomorphism class of connected graphs on `n`
/// vertices.
pub fn connected_classes(n: usize) -> Vec<u32> {
    let perms = permutations(n);
    labeled_connected(n).into_iter().map(|m| canonical_mask(n, m, &perms)).collect::<BTreeSet<_>>().into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_known_sequences() {
        let labeled: Vec<usize> = (1..=6).map(|n| labeled_connected(n).len()).collect();
        assert_eq!(labeled, [1, 1, 4, 38, 728, 26704]);
        let classes: Vec<usize> = (1..=6).map(|n| connected_classes(n).len()).collect();
        assert_eq!(classes, [1, 1, 2, 6, 21, 112]);
    }

    #[test]
    fn masks_become_graphs() {
        let full = (1u32 << 10) - 1;
        let g = mask_graph(5, full);
        assert_eq!(g.edge_count(), 10);
        assert!(g.is_connected());
        assert!(!mask_is_connected(3, 0b001));
    }
}
