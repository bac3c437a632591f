//! The construction algorithm for directed assortative configuration graphs.
//!
//! Of the `N` nodes, `N'` receive i.i.d. types from `P`. Independently,
//! `⌈z N''⌉` edges receive i.i.d. types from `Q`. If all type tallies fall in
//! the acceptance window, edge counts are padded to multiples of the degree,
//! the remaining `N - N'` filler nodes are given the degrees still missing,
//! and half-edges are matched uniformly within each degree class. Otherwise
//! the fallback graph with a single edge is returned.
//!
//! RNG consumption order is fixed: `N'` node-type draws, `⌈z N''⌉` edge-type
//! draws, one shuffle per out-degree class in increasing `k`, then one per
//! in-degree class in increasing `j`. Retries continue on the same stream.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::weighted::WeightedAliasIndex;
use rand_distr::Distribution;
use serde::{Deserialize, Serialize};

use crate::dist::{validate_consistency, EdgeTypeDistribution, NodeTypeDistribution, CONSISTENCY_TOL};
use crate::error::{Error, Result};
use crate::graph::{EdgeType, MultiDigraph, NodeType};

/// RNG used by the seeded entry points.
pub type GraphRng = ChaCha8Rng;

pub const DEFAULT_DELTA: f64 = 0.5001;

/// Ceiling that ignores floating-point residue just above an integer.
pub(crate) fn ceil_tol(x: f64) -> usize {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * x.abs().max(1.0) {
        r as usize
    } else {
        x.ceil() as usize
    }
}

/// How the node budget `N` is split.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SizePlan {
    pub n: usize,
    /// Nodes whose types are sampled from `P`.
    pub n_prime: usize,
    /// `N' + ⌈N^δ⌉`, the scale for the number of sampled edges.
    pub n_doubleprime: usize,
    pub delta: f64,
    /// `N^δ`, unrounded; the acceptance half-widths use this.
    pub n_delta: f64,
}

impl SizePlan {
    pub fn reserved(&self) -> usize {
        self.n - self.n_prime
    }

    /// `⌈z N''⌉`
    pub fn edge_samples(&self, z: f64) -> usize {
        ceil_tol(z * self.n_doubleprime as f64)
    }
}

pub(crate) fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.5 && delta < 1.0) {
        return Err(Error::Validation(format!("delta = {delta} must lie in the open interval (0.5, 1)")));
    }
    Ok(())
}

/// Shared by the main and variant size plans: `reserve(n)` is the number of
/// nodes held back from sampling.
pub(crate) fn plan_with_reserve(n: usize, delta: f64, reserve: impl Fn(usize) -> usize) -> Result<SizePlan> {
    check_delta(delta)?;
    let n_prime = |n: usize| n.saturating_sub(reserve(n));
    if n_prime(n) < 1 {
        return Err(Error::TooSmall { n, min_n: min_feasible(&n_prime) });
    }
    let n_delta = (n as f64).powf(delta);
    let np = n_prime(n);
    Ok(SizePlan { n, n_prime: np, n_doubleprime: np + ceil_tol(n_delta), delta, n_delta })
}

fn min_feasible(n_prime: &impl Fn(usize) -> usize) -> Option<usize> {
    let mut hi = 1usize;
    while n_prime(hi) < 1 {
        // Doubling is cheap; the final scan below is not, so cap the range.
        if hi > 1 << 40 {
            return None;
        }
        hi *= 2;
    }
    // n_prime is not monotone step by step, so scan the last doubling interval.
    (hi / 2..=hi).find(|&n| n_prime(n) >= 1)
}

/// `N' = N - 2⌈N^δ⌉ - max(J², K²)`, `N'' = N' + ⌈N^δ⌉`.
pub fn plan_sizes(n: usize, delta: f64, max_in: usize, max_out: usize) -> Result<SizePlan> {
    let square = max_in.max(max_out).pow(2);
    plan_with_reserve(n, delta, |n| {
        let d = ceil_tol((n as f64).powf(delta));
        d.saturating_mul(2).saturating_add(square)
    })
}

/// Alias-table sampler over the flattened support of a distribution.
#[derive(Debug, Clone)]
pub(crate) struct TypeSampler {
    table: WeightedAliasIndex<f64>,
}

impl TypeSampler {
    pub(crate) fn new(weights: &[f64]) -> Result<Self> {
        let table = WeightedAliasIndex::new(weights.to_vec())
            .map_err(|e| Error::InvalidDistribution(format!("cannot build sampler: {e}")))?;
        Ok(Self { table })
    }

    #[inline]
    pub(crate) fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.table.sample(rng)
    }
}

/// Tallies from sampling, indexed by degree (index 0 unused on the edge side).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeCounts {
    /// `n_k^+`: sampled nodes with out-degree `k`.
    pub nodes_out: Vec<usize>,
    /// `n_j^-`: sampled nodes with in-degree `j`.
    pub nodes_in: Vec<usize>,
    /// `#{e : k_e = k}`
    pub edges_out: Vec<usize>,
    /// `#{e : j_e = j}`
    pub edges_in: Vec<usize>,
    /// `e_k^+ = ⌈#{e : k_e = k} / k⌉`: nodes of out-degree `k` the edges call for.
    pub needed_out: Vec<usize>,
    /// `e_j^- = ⌈#{e : j_e = j} / j⌉`
    pub needed_in: Vec<usize>,
}

impl TypeCounts {
    pub fn tally(max_in: usize, max_out: usize, nodes: &[NodeType], edges: &[EdgeType]) -> Self {
        let mut c = TypeCounts {
            nodes_out: vec![0; max_out + 1],
            nodes_in: vec![0; max_in + 1],
            edges_out: vec![0; max_out + 1],
            edges_in: vec![0; max_in + 1],
            ..Default::default()
        };
        for t in nodes {
            c.nodes_out[t.out_degree] += 1;
            c.nodes_in[t.in_degree] += 1;
        }
        for e in edges {
            c.edges_out[e.source_out] += 1;
            c.edges_in[e.target_in] += 1;
        }
        let per_node = |counts: &[usize]| -> Vec<usize> {
            counts
                .iter()
                .enumerate()
                .map(|(d, &m)| if d == 0 { 0 } else { m.div_ceil(d) })
                .collect()
        };
        c.needed_out = per_node(&c.edges_out);
        c.needed_in = per_node(&c.edges_in);
        c
    }
}

/// Result of the sampling step.
#[derive(Debug, Clone)]
pub struct SampledTypes {
    pub node_types: Vec<NodeType>,
    pub edge_types: Vec<EdgeType>,
    pub counts: TypeCounts,
}

/// Samplers for `P` and `Q`, built once and reused across attempts.
#[derive(Debug, Clone)]
pub struct TypeSamplers {
    max_in: usize,
    max_out: usize,
    nodes: TypeSampler,
    edges: TypeSampler,
}

impl TypeSamplers {
    pub fn new(p: &NodeTypeDistribution, q: &EdgeTypeDistribution) -> Result<Self> {
        if p.max_in() != q.max_in() || p.max_out() != q.max_out() {
            return Err(Error::Validation(format!(
                "node-type matrix is over [0..{}]x[0..{}] but edge-type matrix over [1..{}]x[1..{}]",
                p.max_in(),
                p.max_out(),
                q.max_out(),
                q.max_in()
            )));
        }
        Ok(Self {
            max_in: p.max_in(),
            max_out: p.max_out(),
            nodes: TypeSampler::new(p.as_slice())?,
            edges: TypeSampler::new(q.as_slice())?,
        })
    }
}

/// Draw `node_count` node types from `P`, then `edge_count` edge types from `Q`.
pub fn sample_types<R: Rng + ?Sized>(
    samplers: &TypeSamplers,
    node_count: usize,
    edge_count: usize,
    rng: &mut R,
) -> SampledTypes {
    let (max_in, max_out) = (samplers.max_in, samplers.max_out);
    let node_types: Vec<NodeType> = (0..node_count)
        .map(|_| {
            let idx = samplers.nodes.sample(rng);
            NodeType::new(idx / (max_out + 1), idx % (max_out + 1))
        })
        .collect();
    let edge_types: Vec<EdgeType> = (0..edge_count)
        .map(|_| {
            let idx = samplers.edges.sample(rng);
            EdgeType::new(idx / max_in + 1, idx % max_in + 1)
        })
        .collect();
    let counts = TypeCounts::tally(max_in, max_out, &node_types, &edge_types);
    SampledTypes { node_types, edge_types, counts }
}

/// `|observed - p·scale| <= p·n_delta/2`
#[inline]
pub(crate) fn within_window(observed: usize, p: f64, scale: usize, n_delta: f64) -> bool {
    (observed as f64 - p * scale as f64).abs() <= p * n_delta / 2.0
}

/// Whether the sampled tallies fall inside the acceptance window: for every
/// `k ∈ [1..K]`, `n_k^+` is within `p_k^+ N^δ / 2` of `p_k^+ N'` and `e_k^+`
/// within the same distance of `p_k^+ N''`; likewise for every `j ∈ [1..J]`.
pub fn check_acceptance(counts: &TypeCounts, p: &NodeTypeDistribution, plan: &SizePlan) -> bool {
    let (p_in, p_out) = p.marginals();
    let side = |marginal: &[f64], nodes: &[usize], needed: &[usize]| {
        (1..marginal.len()).all(|d| {
            within_window(nodes[d], marginal[d], plan.n_prime, plan.n_delta)
                && within_window(needed[d], marginal[d], plan.n_doubleprime, plan.n_delta)
        })
    };
    side(&p_out, &counts.nodes_out, &counts.needed_out) && side(&p_in, &counts.nodes_in, &counts.needed_in)
}

/// Edges appended so that every edge-count class is an exact multiple of its degree.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corrections {
    /// `r_k^+ = k e_k^+ - #{e : k_e = k}`, indexed by `k`.
    pub out_padding: Vec<usize>,
    /// `r_j^- = j e_j^- - #{e : j_e = j}`, indexed by `j`.
    pub in_padding: Vec<usize>,
    /// `r^+ = Σ r_k^+`
    pub r_plus: usize,
    /// `r^- = Σ r_j^-`
    pub r_minus: usize,
}

/// Append `r_k^+` edges of type `(k, 1)` for each `k`, then `r_j^-` edges of
/// type `(1, j)` for each `j`.
pub fn correct_cardinalities(edge_types: &mut Vec<EdgeType>, counts: &TypeCounts) -> Corrections {
    let padding = |edges: &[usize], needed: &[usize]| -> Vec<usize> {
        (0..edges.len()).map(|d| d * needed[d] - edges[d]).collect()
    };
    let out_padding = padding(&counts.edges_out, &counts.needed_out);
    let in_padding = padding(&counts.edges_in, &counts.needed_in);
    for (k, &r) in out_padding.iter().enumerate() {
        edge_types.extend(std::iter::repeat_n(EdgeType::new(k, 1), r));
    }
    for (j, &r) in in_padding.iter().enumerate() {
        edge_types.extend(std::iter::repeat_n(EdgeType::new(1, j), r));
    }
    Corrections {
        r_plus: out_padding.iter().sum(),
        r_minus: in_padding.iter().sum(),
        out_padding,
        in_padding,
    }
}

/// Extend `node_types` to `n` nodes with `(0,0)` fillers, then give the
/// fillers the missing degrees: for each `k` ascending, the first
/// `e_k^+ - n_k^+ + r^- [k = 1]` fillers still at out-degree 0 get
/// out-degree `k`; in-degrees likewise.
pub fn complete_degrees(
    node_types: &mut Vec<NodeType>,
    counts: &TypeCounts,
    corrections: &Corrections,
    n: usize,
) -> Result<()> {
    let sampled = node_types.len();
    if sampled > n {
        return Err(Error::Capacity(format!("{sampled} sampled nodes exceed the budget {n}")));
    }
    node_types.resize(n, NodeType::default());

    let deficit = |d: usize, needed: &[usize], have: &[usize], extra: usize| -> Result<usize> {
        let want = needed[d] + if d == 1 { extra } else { 0 };
        want.checked_sub(have[d]).ok_or_else(|| {
            Error::Capacity(format!("degree {d}: {} nodes sampled but only {want} needed", have[d]))
        })
    };

    // Fillers are assigned in index order and start at zero, so "the first
    // still-zero filler" is a running cursor.
    let mut cursor = sampled;
    for k in 1..counts.needed_out.len() {
        let count = deficit(k, &counts.needed_out, &counts.nodes_out, corrections.r_minus)?;
        if cursor + count > n {
            return Err(Error::Capacity(format!("out-degree {k}: {count} fillers needed, {} left", n - cursor)));
        }
        for t in &mut node_types[cursor..cursor + count] {
            t.out_degree = k;
        }
        cursor += count;
    }
    let mut cursor = sampled;
    for j in 1..counts.needed_in.len() {
        let count = deficit(j, &counts.needed_in, &counts.nodes_in, corrections.r_plus)?;
        if cursor + count > n {
            return Err(Error::Capacity(format!("in-degree {j}: {count} fillers needed, {} left", n - cursor)));
        }
        for t in &mut node_types[cursor..cursor + count] {
            t.in_degree = j;
        }
        cursor += count;
    }
    Ok(())
}

/// Attach every edge to a node of the same class. Within each class
/// (classes in increasing order) the edges are uniformly permuted and dealt
/// out in that order to the class's nodes by increasing index, node `v`
/// taking `node_slots(v)` consecutive edges. Returns the node of each edge;
/// `u32` keeps this randomly written array cache-sized.
#[allow(clippy::too_many_arguments)]
pub(crate) fn deal<R: Rng + ?Sized>(
    classes: usize,
    n_edges: usize,
    edge_class: impl Fn(usize) -> usize,
    node_class: impl Fn(usize) -> usize,
    node_slots: impl Fn(usize) -> usize,
    n_nodes: usize,
    rng: &mut R,
    side: &str,
) -> Result<Vec<u32>> {
    if n_edges.max(n_nodes) >= u32::MAX as usize {
        return Err(Error::Match(format!("{side}: {n_nodes} nodes and {n_edges} edges exceed the supported maximum")));
    }
    let mut start = vec![0usize; classes + 1];
    for e in 0..n_edges {
        let c = edge_class(e);
        if c >= classes {
            return Err(Error::Match(format!("{side}: edge {e} has class {c} beyond {}", classes - 1)));
        }
        start[c + 1] += 1;
    }
    let mut slots = vec![0usize; classes];
    for v in 0..n_nodes {
        let count = node_slots(v);
        if count == 0 {
            continue;
        }
        let c = node_class(v);
        if c >= classes {
            return Err(Error::Match(format!("{side}: node {v} has class {c} beyond {}", classes - 1)));
        }
        slots[c] += count;
    }
    for c in 0..classes {
        if slots[c] != start[c + 1] {
            return Err(Error::Match(format!("{side} class {c}: {} edges but {} slots", start[c + 1], slots[c])));
        }
        start[c + 1] += start[c];
    }

    // Edge indices grouped by class, in index order within each class.
    let mut next = start.clone();
    let mut grouped = vec![0u32; n_edges];
    for e in 0..n_edges {
        let c = edge_class(e);
        grouped[next[c]] = e as u32;
        next[c] += 1;
    }
    for c in 0..classes {
        grouped[start[c]..start[c + 1]].shuffle(rng);
    }
    // `next[c]` now marks the end of class `c`; reuse it as a dealing cursor.
    next.copy_from_slice(&start);
    let mut endpoint = vec![0u32; n_edges];
    for v in 0..n_nodes {
        let count = node_slots(v);
        if count == 0 {
            continue;
        }
        let c = node_class(v);
        for &e in &grouped[next[c]..next[c] + count] {
            endpoint[e as usize] = v as u32;
        }
        next[c] += count;
    }
    Ok(endpoint)
}

/// Attach every edge to a source of out-degree `k_e` and a target of
/// in-degree `j_e`, uniformly within each class.
pub fn match_halfedges<R: Rng + ?Sized>(
    node_types: &[NodeType],
    edge_types: &[EdgeType],
    rng: &mut R,
) -> Result<Vec<(usize, usize)>> {
    let max_out = node_types.iter().map(|t| t.out_degree).chain(edge_types.iter().map(|e| e.source_out)).max();
    let max_in = node_types.iter().map(|t| t.in_degree).chain(edge_types.iter().map(|e| e.target_in)).max();
    let (Some(max_out), Some(max_in)) = (max_out, max_in) else {
        return Ok(Vec::new());
    };

    let sources = deal(
        max_out + 1,
        edge_types.len(),
        |e| edge_types[e].source_out,
        |v| node_types[v].out_degree,
        |v| node_types[v].out_degree,
        node_types.len(),
        rng,
        "out-degree",
    )?;
    let targets = deal(
        max_in + 1,
        edge_types.len(),
        |e| edge_types[e].target_in,
        |v| node_types[v].in_degree,
        |v| node_types[v].in_degree,
        node_types.len(),
        rng,
        "in-degree",
    )?;
    Ok(sources.into_iter().zip(targets).map(|(v, w)| (v as usize, w as usize)).collect())
}

/// What to do when the sampled tallies miss the acceptance window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OnReject {
    /// Return the single-edge fallback graph.
    Fallback,
    /// Resample, up to `max_attempts` sampling rounds in total, then fall back.
    Retry { max_attempts: usize },
}

impl OnReject {
    pub(crate) fn attempts(self) -> usize {
        match self {
            OnReject::Fallback => 1,
            OnReject::Retry { max_attempts } => max_attempts.max(1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenerateOptions {
    pub n: usize,
    pub delta: f64,
    pub on_reject: OnReject,
}

impl GenerateOptions {
    pub fn new(n: usize) -> Self {
        Self { n, delta: DEFAULT_DELTA, on_reject: OnReject::Fallback }
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn with_retry(mut self, max_attempts: usize) -> Self {
        self.on_reject = OnReject::Retry { max_attempts };
        self
    }
}

/// Bookkeeping for one generation run. Counts describe the last sampling attempt.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationReport {
    pub accepted: bool,
    pub attempts: usize,
    pub plan: SizePlan,
    /// `⌈z N''⌉`
    pub edge_sample_count: usize,
    pub counts: TypeCounts,
    /// Present only on acceptance.
    pub corrections: Option<Corrections>,
    pub seed: Option<u64>,
}

impl GenerationReport {
    pub fn r_plus(&self) -> usize {
        self.corrections.as_ref().map_or(0, |c| c.r_plus)
    }

    pub fn r_minus(&self) -> usize {
        self.corrections.as_ref().map_or(0, |c| c.r_minus)
    }
}

#[derive(Debug, Clone)]
pub struct GeneratedGraph {
    pub graph: MultiDigraph,
    /// Sampled (and padding) type of each edge, aligned with `graph.edges()`.
    pub edge_types: Vec<EdgeType>,
    pub report: GenerationReport,
}

/// Run the full construction.
pub fn generate<R: Rng + ?Sized>(
    p: &NodeTypeDistribution,
    q: &EdgeTypeDistribution,
    options: &GenerateOptions,
    rng: &mut R,
) -> Result<GeneratedGraph> {
    let report = validate_consistency(p, q, CONSISTENCY_TOL)?;
    if !report.is_consistent() {
        return Err(Error::Validation(format!("edge-type marginals do not match node types: {report}")));
    }
    let z = p.mean_degree()?;
    let plan = plan_sizes(options.n, options.delta, p.max_in(), p.max_out())?;
    let samplers = TypeSamplers::new(p, q)?;
    let edge_sample_count = plan.edge_samples(z);

    let max_attempts = options.on_reject.attempts();
    let mut last_counts = TypeCounts::default();
    for attempt in 1..=max_attempts {
        let SampledTypes { mut node_types, mut edge_types, counts } =
            sample_types(&samplers, plan.n_prime, edge_sample_count, rng);
        if !check_acceptance(&counts, p, &plan) {
            last_counts = counts;
            continue;
        }
        let corrections = correct_cardinalities(&mut edge_types, &counts);
        complete_degrees(&mut node_types, &counts, &corrections, plan.n)?;
        let edges = match_halfedges(&node_types, &edge_types, rng)?;
        return Ok(GeneratedGraph {
            graph: MultiDigraph::new(node_types, edges),
            edge_types,
            report: GenerationReport {
                accepted: true,
                attempts: attempt,
                plan,
                edge_sample_count,
                counts,
                corrections: Some(corrections),
                seed: None,
            },
        });
    }

    Ok(GeneratedGraph {
        graph: MultiDigraph::fallback(plan.n),
        edge_types: vec![EdgeType::new(1, 1)],
        report: GenerationReport {
            accepted: false,
            attempts: max_attempts,
            plan,
            edge_sample_count,
            counts: last_counts,
            corrections: None,
            seed: None,
        },
    })
}

/// [`generate`] with a fresh [`GraphRng`] seeded from `seed`.
pub fn generate_seeded(
    p: &NodeTypeDistribution,
    q: &EdgeTypeDistribution,
    options: &GenerateOptions,
    seed: u64,
) -> Result<GeneratedGraph> {
    let mut rng = GraphRng::seed_from_u64(seed);
    let mut out = generate(p, q, options, &mut rng)?;
    out.report.seed = Some(seed);
    Ok(out)
}
