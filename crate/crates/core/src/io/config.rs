//! TOML run configuration.
//!
//! ```toml
//! n = 1000
//! delta = 0.5001        # optional, open interval (0.5, 1)
//! seed = 7              # optional, default 0
//! erase = true          # optional, default false
//! retry = 100           # optional; absent means fall back on rejection
//! rho = 0.8             # one edge-type source, see below
//!
//! [p]
//! max_in = 4
//! max_out = 4
//! rows = [[...], ...]   # max_in + 1 rows of max_out + 1 entries
//!
//! # Exactly one edge-type source: the top-level `rho` above, or one of
//! # [q]       rows = [...]  max_out rows of max_in entries
//! # [copula]  kind = "mixture", lambda = 0.4
//! # [qv]      rows = [...]  max_out rows of max_out + 1 entries
//!
//! [output]              # optional
//! edges = "edges.csv"
//! nodes = "nodes.csv"
//! stats = "stats.json"
//! format = "csv"        # csv | graphml | dot
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::copula::{calibrate_lambda, q_from_copula, Copula};
use crate::dist::{validate_consistency, EdgeTypeDistribution, NodeTypeDistribution, CONSISTENCY_TOL};
use crate::error::{Error, Result};
use crate::generator::{check_delta, OnReject, DEFAULT_DELTA};
use crate::io::export::GraphFormat;
use crate::variant::{validate_variant_consistency, OutOutEdgeDistribution};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    n: usize,
    delta: Option<f64>,
    seed: Option<u64>,
    #[serde(default)]
    erase: bool,
    retry: Option<usize>,
    p: RawNodeMatrix,
    q: Option<RawMatrix>,
    copula: Option<Copula>,
    rho: Option<f64>,
    qv: Option<RawMatrix>,
    #[serde(default)]
    output: OutputPaths,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNodeMatrix {
    max_in: usize,
    max_out: usize,
    rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMatrix {
    rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    pub edges: Option<PathBuf>,
    pub nodes: Option<PathBuf>,
    pub stats: Option<PathBuf>,
    #[serde(default)]
    pub format: GraphFormat,
}

/// Where the edge-type distribution came from, after resolution.
#[derive(Debug, Clone, PartialEq)]
pub enum EdgeSource {
    Explicit(EdgeTypeDistribution),
    Copula { copula: Copula, q: EdgeTypeDistribution },
    Rho { rho: f64, lambda: f64, q: EdgeTypeDistribution },
    OutOut(OutOutEdgeDistribution),
}

impl EdgeSource {
    /// `Q` for the main construction; `None` for an out-out matrix.
    pub fn edge_types(&self) -> Option<&EdgeTypeDistribution> {
        match self {
            EdgeSource::Explicit(q) | EdgeSource::Copula { q, .. } | EdgeSource::Rho { q, .. } => Some(q),
            EdgeSource::OutOut(_) => None,
        }
    }

    pub fn out_out(&self) -> Option<&OutOutEdgeDistribution> {
        match self {
            EdgeSource::OutOut(qv) => Some(qv),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub n: usize,
    pub delta: f64,
    pub seed: u64,
    pub erase: bool,
    pub on_reject: OnReject,
    pub p: NodeTypeDistribution,
    pub edges: EdgeSource,
    pub output: OutputPaths,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub retry: Option<usize>,
    pub erase: bool,
    /// Replaces whatever edge-type source the file names.
    pub rho: Option<f64>,
}

impl RunConfig {
    pub fn main_edge_types(&self) -> Result<&EdgeTypeDistribution> {
        self.edges
            .edge_types()
            .ok_or_else(|| Error::Validation("config gives an out-out matrix `qv`; expected `q`, `copula` or `rho`".into()))
    }

    pub fn out_out_edge_types(&self) -> Result<&OutOutEdgeDistribution> {
        self.edges
            .out_out()
            .ok_or_else(|| Error::Validation("config has no out-out matrix `qv`".into()))
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    load_config_with(path, &Overrides::default())
}

pub fn load_config_with(path: &Path, overrides: &Overrides) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text, overrides)
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

pub fn parse_config(text: &str, overrides: &Overrides) -> Result<RunConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let message = e.message().trim().to_string();
        match e.span() {
            Some(span) => Error::Parse(format!("line {}: {message}", line_of(text, span.start))),
            None => Error::Parse(message),
        }
    })?;
    resolve(raw, overrides)
}

fn resolve(mut raw: RawConfig, overrides: &Overrides) -> Result<RunConfig> {
    let delta = raw.delta.unwrap_or(DEFAULT_DELTA);
    check_delta(delta)?;
    if raw.n == 0 {
        return Err(Error::Validation("`n` must be positive".into()));
    }
    if let Some(rho) = overrides.rho {
        raw.q = None;
        raw.copula = None;
        raw.qv = None;
        raw.rho = Some(rho);
    }

    let p = NodeTypeDistribution::from_rows(raw.p.max_in, raw.p.max_out, &raw.p.rows)
        .map_err(|e| Error::Validation(format!("`p`: {e}")))?;
    p.mean_degree().map_err(|e| Error::Validation(format!("`p`: {e}")))?;

    let sources = [raw.q.is_some(), raw.copula.is_some(), raw.rho.is_some(), raw.qv.is_some()];
    let edges = match sources.iter().filter(|s| **s).count() {
        0 => return Err(Error::Validation("no edge-type source: give one of `q`, `copula`, `rho`, `qv`".into())),
        1 => resolve_edges(&p, raw.q, raw.copula, raw.rho, raw.qv)?,
        _ => {
            return Err(Error::Validation(
                "ambiguous edge-type source: give exactly one of `q`, `copula`, `rho`, `qv`".into(),
            ))
        }
    };

    let retry = overrides.retry.or(raw.retry);
    let on_reject = match retry {
        None => OnReject::Fallback,
        Some(0) => return Err(Error::Validation("`retry` must be at least 1".into())),
        Some(max_attempts) => OnReject::Retry { max_attempts },
    };

    Ok(RunConfig {
        n: raw.n,
        delta,
        seed: overrides.seed.or(raw.seed).unwrap_or(0),
        erase: raw.erase || overrides.erase,
        on_reject,
        p,
        edges,
        output: raw.output,
    })
}

fn resolve_edges(
    p: &NodeTypeDistribution,
    q: Option<RawMatrix>,
    copula: Option<Copula>,
    rho: Option<f64>,
    qv: Option<RawMatrix>,
) -> Result<EdgeSource> {
    let field = |name: &str, e: Error| Error::Validation(format!("`{name}`: {e}"));
    if let Some(q) = q {
        let q = EdgeTypeDistribution::from_rows(p.max_in(), p.max_out(), &q.rows).map_err(|e| field("q", e))?;
        let report = validate_consistency(p, &q, CONSISTENCY_TOL)?;
        if !report.is_consistent() {
            return Err(Error::Validation(format!("`q` marginals do not match `p`: {report}")));
        }
        return Ok(EdgeSource::Explicit(q));
    }
    if let Some(copula) = copula {
        if let Copula::Mixture { lambda } = copula {
            Copula::mixture(lambda).map_err(|e| field("copula", e))?;
        }
        let q = q_from_copula(p, &copula).map_err(|e| field("copula", e))?;
        return Ok(EdgeSource::Copula { copula, q });
    }
    if let Some(rho) = rho {
        let (lambda, q) = calibrate_lambda(p, rho).map_err(|e| field("rho", e))?;
        return Ok(EdgeSource::Rho { rho, lambda, q });
    }
    let qv = qv.expect("one source is present");
    let qv = OutOutEdgeDistribution::from_rows(p.max_out(), &qv.rows).map_err(|e| field("qv", e))?;
    let report = validate_variant_consistency(p, &qv, CONSISTENCY_TOL)?;
    if !report.is_consistent() {
        return Err(Error::Validation(format!("`qv` marginals do not match `p`: {report}")));
    }
    Ok(EdgeSource::OutOut(qv))
}
