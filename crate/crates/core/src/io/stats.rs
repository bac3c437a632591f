//! The stats JSON document: generation outcome, erasure counts and the
//! empirical summary in one flat object.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::erasure::ErasureReport;
use crate::error::Result;
use crate::generator::GenerationReport;
use crate::metrics::EmpiricalSummary;
use crate::variant::VariantReport;

/// Generation bookkeeping; all `None` for a graph read from files.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunInfo {
    pub accepted: Option<bool>,
    pub n_prime: Option<usize>,
    pub n_doubleprime: Option<usize>,
    pub delta: Option<f64>,
    pub seed: Option<u64>,
    pub attempts: Option<usize>,
    pub r_plus: Option<usize>,
    pub r_minus: Option<usize>,
}

impl From<&GenerationReport> for RunInfo {
    fn from(r: &GenerationReport) -> Self {
        RunInfo {
            accepted: Some(r.accepted),
            n_prime: Some(r.plan.n_prime),
            n_doubleprime: Some(r.plan.n_doubleprime),
            delta: Some(r.plan.delta),
            seed: r.seed,
            attempts: Some(r.attempts),
            r_plus: Some(r.r_plus()),
            r_minus: Some(r.r_minus()),
        }
    }
}

impl From<&VariantReport> for RunInfo {
    fn from(r: &VariantReport) -> Self {
        RunInfo {
            accepted: Some(r.accepted),
            n_prime: Some(r.plan.n_prime),
            n_doubleprime: Some(r.plan.n_doubleprime),
            delta: Some(r.plan.delta),
            seed: r.seed,
            attempts: Some(r.attempts),
            r_plus: None,
            r_minus: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeFrequency {
    pub j: usize,
    pub k: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EdgeFrequency {
    /// Source out-degree `k`, target in-degree `j`.
    OutIn { k: usize, j: usize, value: f64 },
    /// Source out-degree `k`, target out-degree `k_target`.
    OutOut { k: usize, k_target: usize, value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeTypeKind {
    OutIn,
    OutOut,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsDocument {
    pub n: usize,
    #[serde(flatten)]
    pub run: RunInfo,
    /// Whether the summary describes the erased graph.
    pub erased: bool,
    pub edges_before: usize,
    pub edges_after: usize,
    pub self_loops_removed: usize,
    pub excess_parallel_removed: usize,
    pub multi_pairs: usize,
    pub edge_type: EdgeTypeKind,
    pub p_hat: Vec<NodeFrequency>,
    pub q_hat: Vec<EdgeFrequency>,
    pub rho_hat: Option<f64>,
    pub deviation: f64,
}

impl StatsDocument {
    /// `erasure` counts are those of erasing the generated multigraph, whether
    /// or not `summary` was computed on the erased graph.
    pub fn new(
        summary: &EmpiricalSummary,
        run: RunInfo,
        erasure: &ErasureReport,
        erased: bool,
        edge_type: EdgeTypeKind,
    ) -> Self {
        let p_hat = summary.p_hat.iter().map(|(&(j, k), &value)| NodeFrequency { j, k, value }).collect();
        let q_hat = summary
            .q_hat
            .iter()
            .map(|(&(a, b), &value)| match edge_type {
                EdgeTypeKind::OutIn => EdgeFrequency::OutIn { k: a, j: b, value },
                EdgeTypeKind::OutOut => EdgeFrequency::OutOut { k: a, k_target: b, value },
            })
            .collect();
        StatsDocument {
            n: summary.node_count,
            run,
            erased,
            edges_before: erasure.edges_before,
            edges_after: erasure.edges_after,
            self_loops_removed: erasure.self_loops_removed,
            excess_parallel_removed: erasure.excess_parallel_removed,
            multi_pairs: erasure.multi_pairs,
            edge_type,
            p_hat,
            q_hat,
            rho_hat: summary.rho_hat,
            deviation: summary.deviation,
        }
    }
}

pub fn write_stats<W: Write + ?Sized>(doc: &StatsDocument, out: &mut W) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, doc).map_err(std::io::Error::from)?;
    writeln!(out)?;
    Ok(())
}
