//! Erased configuration graph: drop self-loops and collapse parallel edges.

use serde::{Deserialize, Serialize};

use crate::graph::{MultiDigraph, NodeType};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErasureReport {
    /// `S_N`: self-loop edges removed.
    pub self_loops_removed: usize,
    /// `M_N`: parallel copies removed beyond the one kept per ordered pair.
    pub excess_parallel_removed: usize,
    /// Ordered pairs `(v, w)`, `v != w`, that carried two or more edges.
    pub multi_pairs: usize,
    pub edges_before: usize,
    pub edges_after: usize,
}

/// Remove every self-loop and keep only the first copy (by position) of each
/// ordered pair. Node types of the result are the surviving degrees.
///
/// Edges are bucketed by source with a stable counting sort, so within a
/// bucket they appear in sequence order and the first copy of `(v, w)` is
/// the first one met. Linear in nodes plus edges; indices are stored as
/// `u32` to keep the random-access arrays small.
///
/// # Panics
///
/// If the graph has `u32::MAX` or more nodes or edges.
pub fn erase(g: &MultiDigraph) -> (MultiDigraph, ErasureReport) {
    let (n, edges) = (g.node_count(), g.edges());
    assert!(n < u32::MAX as usize && edges.len() < u32::MAX as usize, "graph too large to erase");
    let mut report = ErasureReport { edges_before: edges.len(), ..Default::default() };

    let mut bucket_start = vec![0u32; n + 1];
    for &(v, _) in edges {
        bucket_start[v + 1] += 1;
    }
    for v in 0..n {
        bucket_start[v + 1] += bucket_start[v];
    }
    // Targets grouped by source. Edge `i` from `v` lands in slot
    // `bucket_start[v] + (number of earlier edges from v)`, which the final
    // pass recomputes instead of storing positions.
    let mut next = bucket_start.clone();
    let mut targets = vec![0u32; edges.len()];
    for &(v, w) in edges {
        targets[next[v] as usize] = w as u32;
        next[v] += 1;
    }

    // `marks[w] = (a, b)`: `a == v` once `(v, w)` has a kept copy, `b == v`
    // once it has a second one. Surviving degrees are tallied on the way.
    let mut marks = vec![(u32::MAX, u32::MAX); n];
    let mut in_degree = vec![0u32; n];
    let mut out_degree = vec![0u32; n];
    let mut keep = vec![false; edges.len()];
    for v in 0..n {
        let source = v as u32;
        let (lo, hi) = (bucket_start[v] as usize, bucket_start[v + 1] as usize);
        for (&w, kept) in targets[lo..hi].iter().zip(&mut keep[lo..hi]) {
            let mark = &mut marks[w as usize];
            if w == source {
                report.self_loops_removed += 1;
            } else if mark.0 != source {
                mark.0 = source;
                *kept = true;
                out_degree[v] += 1;
                in_degree[w as usize] += 1;
            } else {
                report.excess_parallel_removed += 1;
                if mark.1 != source {
                    mark.1 = source;
                    report.multi_pairs += 1;
                }
            }
        }
    }
    drop((targets, marks));

    next.copy_from_slice(&bucket_start);
    let kept: Vec<(usize, usize)> = edges
        .iter()
        .filter(|&&(v, _)| {
            let slot = next[v] as usize;
            next[v] += 1;
            keep[slot]
        })
        .copied()
        .collect();
    report.edges_after = kept.len();
    let types = in_degree.iter().zip(&out_degree).map(|(&j, &k)| NodeType::new(j as usize, k as usize)).collect();
    (MultiDigraph::new(types, kept), report)
}

/// No self-loops and no repeated ordered pair. Anti-parallel edges are fine.
pub fn is_simple(g: &MultiDigraph) -> bool {
    let mut seen = std::collections::HashSet::with_capacity(g.edge_count());
    g.edges().iter().all(|&(v, w)| v != w && seen.insert((v, w)))
}
