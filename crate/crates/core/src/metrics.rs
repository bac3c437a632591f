//! Empirical node- and edge-type frequencies of a realized graph and their
//! distance to the target distributions.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dist::{EdgeTypeDistribution, NodeTypeDistribution};
use crate::graph::{EdgeType, MultiDigraph, NodeType};

/// Type pair used as a map key: `(j, k)` for nodes, `(k, j)` for edges.
pub type TypeKey = (usize, usize);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalSummary {
    pub node_count: usize,
    /// `𝓔`
    pub edge_count: usize,
    /// `𝓥_{j,k} / N`, keyed by `(j, k)`; observed types only.
    pub p_hat: BTreeMap<TypeKey, f64>,
    /// `𝓔_{k,j} / 𝓔`, keyed by `(k, j)`; observed types only.
    pub q_hat: BTreeMap<TypeKey, f64>,
    /// Pearson correlation of edge-type pairs; `None` if there are no edges or
    /// either coordinate is constant.
    pub rho_hat: Option<f64>,
    /// `Σ |p̂ - p| + Σ |q̂ - q|` over the union of supports.
    pub deviation: f64,
}

impl EmpiricalSummary {
    pub fn p_hat(&self, j: usize, k: usize) -> f64 {
        self.p_hat.get(&(j, k)).copied().unwrap_or(0.0)
    }

    pub fn q_hat(&self, k: usize, j: usize) -> f64 {
        self.q_hat.get(&(k, j)).copied().unwrap_or(0.0)
    }
}

fn frequencies(counts: BTreeMap<TypeKey, usize>, total: usize) -> BTreeMap<TypeKey, f64> {
    counts.into_iter().map(|(key, c)| (key, c as f64 / total as f64)).collect()
}

fn l1_distance(empirical: &BTreeMap<TypeKey, f64>, target: &BTreeMap<TypeKey, f64>) -> f64 {
    let mut sum = 0.0;
    for (key, &t) in target {
        sum += (empirical.get(key).copied().unwrap_or(0.0) - t).abs();
    }
    for (key, &e) in empirical {
        if !target.contains_key(key) {
            sum += e;
        }
    }
    sum
}

pub(crate) fn pearson(pairs: impl Iterator<Item = (usize, usize)>) -> Option<f64> {
    let (mut n, mut sx, mut sy) = (0usize, 0.0f64, 0.0f64);
    let (mut sxx, mut syy, mut sxy) = (0.0f64, 0.0f64, 0.0f64);
    for (x, y) in pairs {
        let (x, y) = (x as f64, y as f64);
        n += 1;
        sx += x;
        sy += y;
        sxx += x * x;
        syy += y * y;
        sxy += x * y;
    }
    if n == 0 {
        return None;
    }
    let n = n as f64;
    let cov = sxy / n - (sx / n) * (sy / n);
    let vx = sxx / n - (sx / n).powi(2);
    let vy = syy / n - (sy / n).powi(2);
    if vx <= 1e-12 || vy <= 1e-12 {
        return None;
    }
    Some((cov / (vx.sqrt() * vy.sqrt())).clamp(-1.0, 1.0))
}

/// Shared by the main and variant edge-type conventions.
pub(crate) fn summarize(
    g: &MultiDigraph,
    node_target: &BTreeMap<TypeKey, f64>,
    edge_target: &BTreeMap<TypeKey, f64>,
    edge_key: impl Fn(&NodeType, &NodeType) -> TypeKey,
) -> EmpiricalSummary {
    let types = g.node_types();
    let mut node_counts = BTreeMap::new();
    for t in types {
        *node_counts.entry((t.in_degree, t.out_degree)).or_insert(0) += 1;
    }
    let mut edge_counts = BTreeMap::new();
    for &(v, w) in g.edges() {
        *edge_counts.entry(edge_key(&types[v], &types[w])).or_insert(0) += 1;
    }

    let p_hat = frequencies(node_counts, g.node_count().max(1));
    let q_hat = if g.edge_count() == 0 {
        BTreeMap::new()
    } else {
        frequencies(edge_counts, g.edge_count())
    };
    // With no edges, the edge type of a sampled edge is taken to be (1, 1).
    let q_for_distance = if g.edge_count() == 0 { BTreeMap::from([((1, 1), 1.0)]) } else { q_hat.clone() };
    let deviation = l1_distance(&p_hat, node_target) + l1_distance(&q_for_distance, edge_target);
    let rho_hat = pearson(g.edges().iter().map(|&(v, w)| edge_key(&types[v], &types[w])));

    EmpiricalSummary { node_count: g.node_count(), edge_count: g.edge_count(), p_hat, q_hat, rho_hat, deviation }
}

pub(crate) fn node_targets(p: &NodeTypeDistribution) -> BTreeMap<TypeKey, f64> {
    let mut out = BTreeMap::new();
    for j in 0..=p.max_in() {
        for k in 0..=p.max_out() {
            let v = p.prob(j, k);
            if v > 0.0 {
                out.insert((j, k), v);
            }
        }
    }
    out
}

fn edge_targets(q: &EdgeTypeDistribution) -> BTreeMap<TypeKey, f64> {
    let mut out = BTreeMap::new();
    for k in 1..=q.max_out() {
        for j in 1..=q.max_in() {
            let v = q.prob(k, j);
            if v > 0.0 {
                out.insert((k, j), v);
            }
        }
    }
    out
}

/// Empirical distributions of `g` and the deviation from `(p, q)`. Edge types
/// are read from the current node types as `(k_v, j_w)`.
pub fn empirical_summary(g: &MultiDigraph, p: &NodeTypeDistribution, q: &EdgeTypeDistribution) -> EmpiricalSummary {
    summarize(g, &node_targets(p), &edge_targets(q), |s, t| (s.out_degree, t.in_degree))
}

/// Types of `s` nodes drawn uniformly with replacement.
///
/// # Panics
///
/// If `g` has no nodes.
pub fn sample_node_types<R: Rng + ?Sized>(g: &MultiDigraph, s: usize, rng: &mut R) -> Vec<NodeType> {
    let types = g.node_types();
    assert!(!types.is_empty(), "cannot sample from an empty node set");
    (0..s).map(|_| types[rng.random_range(0..types.len())]).collect()
}

/// Types of `s` edges drawn uniformly with replacement; `(1, 1)` for every
/// draw if the graph has no edges.
pub fn sample_edge_types<R: Rng + ?Sized>(g: &MultiDigraph, s: usize, rng: &mut R) -> Vec<EdgeType> {
    if g.edge_count() == 0 {
        return vec![EdgeType::new(1, 1); s];
    }
    let (types, edges) = (g.node_types(), g.edges());
    (0..s)
        .map(|_| {
            let (v, w) = edges[rng.random_range(0..edges.len())];
            EdgeType::new(types[v].out_degree, types[w].in_degree)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::GraphRng;
    use rand::SeedableRng;

    fn unit() -> (NodeTypeDistribution, EdgeTypeDistribution) {
        (
            NodeTypeDistribution::from_entries(1, 1, &[((1, 1), 1.0)]).unwrap(),
            EdgeTypeDistribution::from_entries(1, 1, &[((1, 1), 1.0)]).unwrap(),
        )
    }

    #[test]
    fn fallback_summary() {
        let (p, q) = unit();
        let g = MultiDigraph::fallback(10);
        let s = empirical_summary(&g, &p, &q);
        assert!((s.p_hat(0, 1) - 0.1).abs() < 1e-15);
        assert!((s.p_hat(1, 0) - 0.1).abs() < 1e-15);
        assert!((s.p_hat(0, 0) - 0.8).abs() < 1e-15);
        assert_eq!(s.q_hat(1, 1), 1.0);
        assert_eq!(s.rho_hat, None);
        // p̂ puts no mass on (1,1): distance 2 on the node side, 0 on the edge side.
        assert!((s.deviation - 2.0).abs() < 1e-12);
    }

    #[test]
    fn permutation_digraph_summary() {
        let (p, q) = unit();
        let g = MultiDigraph::from_edges(3, vec![(0, 1), (1, 2), (2, 0)]);
        let s = empirical_summary(&g, &p, &q);
        assert_eq!(s.q_hat, BTreeMap::from([((1, 1), 1.0)]));
        assert_eq!(s.rho_hat, None);
        assert_eq!(s.deviation, 0.0);
    }

    #[test]
    fn empty_edge_set_uses_unit_edge_type() {
        let (p, q) = unit();
        let g = MultiDigraph::from_edges(2, vec![]);
        let s = empirical_summary(&g, &p, &q);
        assert!(s.q_hat.is_empty());
        assert!((s.deviation - 2.0).abs() < 1e-12);
        let mut rng = GraphRng::seed_from_u64(3);
        assert_eq!(sample_edge_types(&g, 4, &mut rng), vec![EdgeType::new(1, 1); 4]);
    }

    #[test]
    fn single_node_sampling() {
        let g = MultiDigraph::from_edges(1, vec![(0, 0), (0, 0)]);
        let mut rng = GraphRng::seed_from_u64(3);
        assert_eq!(sample_node_types(&g, 5, &mut rng), vec![NodeType::new(2, 2); 5]);
        assert_eq!(sample_edge_types(&g, 2, &mut rng), vec![EdgeType::new(2, 2); 2]);
    }

    #[test]
    fn pearson_matches_hand_computation() {
        // x = (1, 2, 3), y = (1, 3, 2): cov = 1/3, var = 2/3 each.
        let r = pearson([(1, 1), (2, 3), (3, 2)].into_iter()).unwrap();
        assert!((r - 0.5).abs() < 1e-12);
        assert_eq!(pearson([(1, 1), (1, 2)].into_iter()), None);
        assert_eq!(pearson(std::iter::empty()), None);
    }
}
