//! Edge types defined by the out-degrees of both endpoints.
//!
//! Here the type of `<v, w>` is `(k_v, k_w)`. Consistency requires the source
//! marginal `q^l_k = k p_k^+ / z` for `k ∈ [1..K]` and the target marginal
//! `q^r_{k'} = Σ_j j p_{j,k'} / z` for `k' ∈ [0..K]`.
//!
//! The construction mirrors the main algorithm. The correction phase differs:
//!
//! 1. for each `k`, pad the `k`-edges to a multiple of `k` with edges of type
//!    `(k, 0)`, adding one `(1, 0)` node per padding edge to receive it;
//! 2. for each `k`, add `e^l_k - n^l_k` nodes of type `(0, k)`;
//! 3. for each `k'`, add `e^r_{k'} - n^r_{k'}` nodes of type `(1, k')`; when
//!    `k' ≥ 1` each comes with `k'` edges of type `(k', 0)` and one `(k', 0)`
//!    node to receive them.
//!
//! Matching deals source slots by out-degree as before, and target slots by
//! the *out*-degree of the target: a node of type `(j, k)` offers `j` slots
//! in class `k`.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::dist::{Side, ValidationReport, CONSISTENCY_TOL, STRUCTURAL_TOL};
use crate::error::{Error, Result};
use crate::generator::{ceil_tol, deal, plan_with_reserve, within_window, GraphRng, OnReject, SizePlan, TypeSampler};
use crate::graph::{MultiDigraph, NodeType};
use crate::metrics::{node_targets, summarize, EmpiricalSummary, TypeKey};
use crate::dist::NodeTypeDistribution;

/// `Q = (q_{k,k'})` over `[1..K] x [0..K]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutOutEdgeDistribution {
    max_out: usize,
    // row-major, index (k - 1) * (K + 1) + k'
    probs: Vec<f64>,
}

impl OutOutEdgeDistribution {
    /// Rows indexed by source out-degree `k = 1..=K`, columns by target out-degree `k' = 0..=K`.
    pub fn from_rows(max_out: usize, rows: &[Vec<f64>]) -> Result<Self> {
        if max_out == 0 {
            return Err(Error::InvalidDistribution("maximal out-degree must be at least 1".into()));
        }
        if rows.len() != max_out || rows.iter().any(|r| r.len() != max_out + 1) {
            return Err(Error::InvalidDistribution(format!(
                "out-out edge-type matrix must be {max_out} x {}",
                max_out + 1
            )));
        }
        let probs: Vec<f64> = rows.concat();
        if let Some(bad) = probs.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidDistribution(format!("out-out edge-type matrix has entry {bad}")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > STRUCTURAL_TOL {
            return Err(Error::InvalidDistribution(format!("out-out edge-type matrix sums to {total}")));
        }
        Ok(Self { max_out, probs })
    }

    pub fn from_entries(max_out: usize, entries: &[((usize, usize), f64)]) -> Result<Self> {
        let mut rows = vec![vec![0.0; max_out + 1]; max_out];
        for &((k, kp), q) in entries {
            if k == 0 || k > max_out || kp > max_out {
                return Err(Error::InvalidDistribution(format!(
                    "edge type ({k},{kp}) outside [1..{max_out}]x[0..{max_out}]"
                )));
            }
            rows[k - 1][kp] += q;
        }
        Self::from_rows(max_out, &rows)
    }

    pub fn max_out(&self) -> usize {
        self.max_out
    }

    pub fn prob(&self, k: usize, k_target: usize) -> f64 {
        if k == 0 || k > self.max_out || k_target > self.max_out {
            return 0.0;
        }
        self.probs[(k - 1) * (self.max_out + 1) + k_target]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.probs.chunks(self.max_out + 1).map(<[f64]>::to_vec).collect()
    }

    /// `q^l_k`, indexed `0..=K` with index 0 zero.
    pub fn source_marginal(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.max_out + 1];
        for (k, row) in self.probs.chunks(self.max_out + 1).enumerate() {
            out[k + 1] = row.iter().sum();
        }
        out
    }

    /// `q^r_{k'}`, indexed `0..=K`.
    pub fn target_marginal(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.max_out + 1];
        for row in self.probs.chunks(self.max_out + 1) {
            for (kp, &q) in row.iter().enumerate() {
                out[kp] += q;
            }
        }
        out
    }
}

/// Check `q^l_k = k p_k^+ / z` and `q^r_{k'} = Σ_j j p_{j,k'} / z`. Source
/// violations are reported as [`Side::Out`], target ones as [`Side::In`].
pub fn validate_variant_consistency(
    p: &NodeTypeDistribution,
    qv: &OutOutEdgeDistribution,
    tol: f64,
) -> Result<ValidationReport> {
    let z = p.mean_degree()?;
    let p_out = p.out_marginal();
    let in_mass = p.in_mass_by_out_degree();
    let (q_l, q_r) = (qv.source_marginal(), qv.target_marginal());
    let top = p.max_out().max(qv.max_out());
    let at = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);

    let mut report = ValidationReport::default();
    for k in 1..=top {
        report.check(Side::Out, k, at(&q_l, k), k as f64 * at(&p_out, k) / z, tol);
    }
    for kp in 0..=top {
        report.check(Side::In, kp, at(&q_r, kp), at(&in_mass, kp) / z, tol);
    }
    Ok(report)
}

/// `N' = N - ⌈2(1+z)⌈N^δ⌉⌉ - K²`, `N'' = N' + ⌈N^δ⌉`.
pub fn plan_sizes_variant(n: usize, delta: f64, max_out: usize, z: f64) -> Result<SizePlan> {
    plan_with_reserve(n, delta, |n| {
        let d = ceil_tol((n as f64).powf(delta)) as f64;
        ceil_tol(2.0 * (1.0 + z) * d).saturating_add(max_out * max_out)
    })
}

/// Tallies for the variant, indexed by out-degree.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariantCounts {
    /// `n^l_k`: sampled nodes with out-degree `k`.
    pub nodes_source: Vec<usize>,
    /// `#{e : k_e = k}`
    pub edges_source: Vec<usize>,
    /// `e^l_k = ⌈#{e : k_e = k} / k⌉`
    pub needed_source: Vec<usize>,
    /// `n^r_{k'}`: total in-degree of sampled nodes with out-degree `k'`.
    pub in_mass: Vec<usize>,
    /// `e^r_{k'} = #{e : k'_e = k'}`
    pub edges_target: Vec<usize>,
}

impl VariantCounts {
    pub fn tally(max_out: usize, nodes: &[NodeType], edges: &[(usize, usize)]) -> Self {
        let mut c = VariantCounts {
            nodes_source: vec![0; max_out + 1],
            edges_source: vec![0; max_out + 1],
            needed_source: vec![0; max_out + 1],
            in_mass: vec![0; max_out + 1],
            edges_target: vec![0; max_out + 1],
        };
        for t in nodes {
            c.nodes_source[t.out_degree] += 1;
            c.in_mass[t.out_degree] += t.in_degree;
        }
        for &(k, kp) in edges {
            c.edges_source[k] += 1;
            c.edges_target[kp] += 1;
        }
        for k in 1..=max_out {
            c.needed_source[k] = c.edges_source[k].div_ceil(k);
        }
        c
    }
}

pub fn check_variant_acceptance(counts: &VariantCounts, p: &NodeTypeDistribution, plan: &SizePlan) -> bool {
    let p_out = p.out_marginal();
    let mass = p.in_mass_by_out_degree();
    let source_ok = (1..p_out.len()).all(|k| {
        within_window(counts.nodes_source[k], p_out[k], plan.n_prime, plan.n_delta)
            && within_window(counts.needed_source[k], p_out[k], plan.n_doubleprime, plan.n_delta)
    });
    let target_ok = (0..mass.len()).all(|kp| {
        within_window(counts.in_mass[kp], mass[kp], plan.n_prime, plan.n_delta)
            && within_window(counts.edges_target[kp], mass[kp], plan.n_doubleprime, plan.n_delta)
    });
    source_ok && target_ok
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantReport {
    pub accepted: bool,
    /// The last accepted sample needed more filler nodes than `N - N'`.
    pub capacity_shortfall: bool,
    pub attempts: usize,
    pub plan: SizePlan,
    pub edge_sample_count: usize,
    pub counts: VariantCounts,
    pub added_nodes: usize,
    pub added_edges: usize,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct VariantGraph {
    pub graph: MultiDigraph,
    /// `(k_e, k'_e)` for each edge, aligned with `graph.edges()`.
    pub edge_types: Vec<(usize, usize)>,
    pub report: VariantReport,
}

struct Completion {
    node_types: Vec<NodeType>,
    edge_types: Vec<(usize, usize)>,
    added_nodes: usize,
    added_edges: usize,
}

/// Correction phase. Returns `None` when the filler budget runs out.
fn complete_variant(
    mut node_types: Vec<NodeType>,
    mut edge_types: Vec<(usize, usize)>,
    counts: &VariantCounts,
    n: usize,
) -> Result<Option<Completion>> {
    let max_out = counts.nodes_source.len() - 1;
    let sampled_nodes = node_types.len();
    let sampled_edges = edge_types.len();
    let add = |t: NodeType, count: usize, nodes: &mut Vec<NodeType>| -> bool {
        if nodes.len() + count > n {
            return false;
        }
        nodes.extend(std::iter::repeat_n(t, count));
        true
    };

    for k in 1..=max_out {
        let pad = k * counts.needed_source[k] - counts.edges_source[k];
        edge_types.extend(std::iter::repeat_n((k, 0), pad));
        if !add(NodeType::new(1, 0), pad, &mut node_types) {
            return Ok(None);
        }
    }
    for k in 1..=max_out {
        let missing = counts.needed_source[k].checked_sub(counts.nodes_source[k]).ok_or_else(|| {
            Error::Capacity(format!("out-degree {k}: more nodes sampled than edges require"))
        })?;
        if !add(NodeType::new(0, k), missing, &mut node_types) {
            return Ok(None);
        }
    }
    for kp in 0..=max_out {
        let missing = counts.edges_target[kp].checked_sub(counts.in_mass[kp]).ok_or_else(|| {
            Error::Capacity(format!("target class {kp}: more in-slots sampled than edges require"))
        })?;
        for _ in 0..missing {
            if !add(NodeType::new(1, kp), 1, &mut node_types) {
                return Ok(None);
            }
            if kp >= 1 {
                edge_types.extend(std::iter::repeat_n((kp, 0), kp));
                if !add(NodeType::new(kp, 0), 1, &mut node_types) {
                    return Ok(None);
                }
            }
        }
    }
    let added_nodes = node_types.len() - sampled_nodes;
    let added_edges = edge_types.len() - sampled_edges;
    node_types.resize(n, NodeType::default());
    Ok(Some(Completion { node_types, edge_types, added_nodes, added_edges }))
}

/// Attach each edge of type `(k, k')` to a source of out-degree `k` and a target of out-degree `k'`.
pub fn match_variant<R: Rng + ?Sized>(
    node_types: &[NodeType],
    edge_types: &[(usize, usize)],
    rng: &mut R,
) -> Result<Vec<(usize, usize)>> {
    let classes = node_types
        .iter()
        .map(|t| t.out_degree)
        .chain(edge_types.iter().flat_map(|&(k, kp)| [k, kp]))
        .max()
        .map_or(0, |m| m + 1);
    if edge_types.is_empty() {
        return Ok(Vec::new());
    }
    let sources = deal(
        classes,
        edge_types.len(),
        |e| edge_types[e].0,
        |v| node_types[v].out_degree,
        |v| node_types[v].out_degree,
        node_types.len(),
        rng,
        "source",
    )?;
    let targets = deal(
        classes,
        edge_types.len(),
        |e| edge_types[e].1,
        |v| node_types[v].out_degree,
        |v| node_types[v].in_degree,
        node_types.len(),
        rng,
        "target",
    )?;
    Ok(sources.into_iter().zip(targets).map(|(v, w)| (v as usize, w as usize)).collect())
}

/// Run the variant construction.
///
/// A sample inside the acceptance window whose corrections would need more
/// than `N - N'` filler nodes is treated like a rejected sample and flagged
/// in the report.
pub fn generate_variant<R: Rng + ?Sized>(
    p: &NodeTypeDistribution,
    qv: &OutOutEdgeDistribution,
    n: usize,
    delta: f64,
    on_reject: OnReject,
    rng: &mut R,
) -> Result<VariantGraph> {
    if p.max_out() != qv.max_out() {
        return Err(Error::Validation(format!(
            "node types have maximal out-degree {} but the out-out matrix {}",
            p.max_out(),
            qv.max_out()
        )));
    }
    let report = validate_variant_consistency(p, qv, CONSISTENCY_TOL)?;
    if !report.is_consistent() {
        return Err(Error::Validation(format!("out-out edge-type marginals do not match node types: {report}")));
    }
    let z = p.mean_degree()?;
    let plan = plan_sizes_variant(n, delta, p.max_out(), z)?;
    let edge_sample_count = plan.edge_samples(z);
    let node_sampler = TypeSampler::new(p.as_slice())?;
    let edge_sampler = TypeSampler::new(&qv.probs)?;
    let (max_out, width) = (p.max_out(), p.max_out() + 1);

    let max_attempts = on_reject.attempts();
    let mut last = (VariantCounts::default(), false);
    for attempt in 1..=max_attempts {
        let node_types: Vec<NodeType> = (0..plan.n_prime)
            .map(|_| {
                let idx = node_sampler.sample(rng);
                NodeType::new(idx / width, idx % width)
            })
            .collect();
        let edge_types: Vec<(usize, usize)> = (0..edge_sample_count)
            .map(|_| {
                let idx = edge_sampler.sample(rng);
                (idx / width + 1, idx % width)
            })
            .collect();
        let counts = VariantCounts::tally(max_out, &node_types, &edge_types);
        if !check_variant_acceptance(&counts, p, &plan) {
            last = (counts, false);
            continue;
        }
        let Some(done) = complete_variant(node_types, edge_types, &counts, plan.n)? else {
            last = (counts, true);
            continue;
        };
        let edges = match_variant(&done.node_types, &done.edge_types, rng)?;
        return Ok(VariantGraph {
            graph: MultiDigraph::new(done.node_types, edges),
            edge_types: done.edge_types,
            report: VariantReport {
                accepted: true,
                capacity_shortfall: false,
                attempts: attempt,
                plan,
                edge_sample_count,
                counts,
                added_nodes: done.added_nodes,
                added_edges: done.added_edges,
                seed: None,
            },
        });
    }

    let graph = MultiDigraph::fallback(plan.n);
    let fallback_type = (1, graph.node_types()[1].out_degree);
    Ok(VariantGraph {
        graph,
        edge_types: vec![fallback_type],
        report: VariantReport {
            accepted: false,
            capacity_shortfall: last.1,
            attempts: max_attempts,
            plan,
            edge_sample_count,
            counts: last.0,
            added_nodes: 0,
            added_edges: 0,
            seed: None,
        },
    })
}

pub fn generate_variant_seeded(
    p: &NodeTypeDistribution,
    qv: &OutOutEdgeDistribution,
    n: usize,
    delta: f64,
    on_reject: OnReject,
    seed: u64,
) -> Result<VariantGraph> {
    let mut rng = GraphRng::seed_from_u64(seed);
    let mut out = generate_variant(p, qv, n, delta, on_reject, &mut rng)?;
    out.report.seed = Some(seed);
    Ok(out)
}

/// Empirical summary with edge types `(k_v, k_w)` measured against `qv`.
pub fn empirical_summary_variant(
    g: &MultiDigraph,
    p: &NodeTypeDistribution,
    qv: &OutOutEdgeDistribution,
) -> EmpiricalSummary {
    let mut edge_target: BTreeMap<TypeKey, f64> = BTreeMap::new();
    for k in 1..=qv.max_out() {
        for kp in 0..=qv.max_out() {
            let v = qv.prob(k, kp);
            if v > 0.0 {
                edge_target.insert((k, kp), v);
            }
        }
    }
    summarize(g, &node_targets(p), &edge_target, |s, t| (s.out_degree, t.out_degree))
}
