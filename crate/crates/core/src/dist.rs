//! Node-type and edge-type distributions.
//!
//! A node type is the bi-degree `(j, k)`: in-degree `j` and out-degree `k`.
//! An edge type for `<v, w>` is `(k, j)`: the out-degree of the source and the
//! in-degree of the target. The two distributions must agree through the
//! degree-weighted marginal identities
//!
//! ```text
//! q_k^+ = k p_k^+ / z,    q_j^- = j p_j^- / z
//! ```
//!
//! where `z` is the mean degree.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for structural sums (`Σ p = 1`, in/out mean balance).
pub const STRUCTURAL_TOL: f64 = 1e-12;

/// Default tolerance for the marginal consistency cross-check.
pub const CONSISTENCY_TOL: f64 = 1e-9;

fn check_probabilities(values: &[f64], what: &str) -> Result<()> {
    for (i, &v) in values.iter().enumerate() {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::InvalidDistribution(format!(
                "{what}: entry {i} is {v}, expected a finite non-negative value"
            )));
        }
    }
    let total: f64 = values.iter().sum();
    if (total - 1.0).abs() > STRUCTURAL_TOL {
        return Err(Error::InvalidDistribution(format!(
            "{what}: entries sum to {total}, expected 1"
        )));
    }
    Ok(())
}

fn check_rows(rows: &[Vec<f64>], n_rows: usize, n_cols: usize, what: &str) -> Result<Vec<f64>> {
    if rows.len() != n_rows {
        return Err(Error::InvalidDistribution(format!(
            "{what}: expected {n_rows} rows, got {}",
            rows.len()
        )));
    }
    let mut flat = Vec::with_capacity(n_rows * n_cols);
    for (r, row) in rows.iter().enumerate() {
        if row.len() != n_cols {
            return Err(Error::InvalidDistribution(format!(
                "{what}: row {r} has {} entries, expected {n_cols}",
                row.len()
            )));
        }
        flat.extend_from_slice(row);
    }
    Ok(flat)
}

/// Joint distribution `P = (p_{j,k})` of node types over `[0..J] x [0..K]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeTypeDistribution {
    max_in: usize,
    max_out: usize,
    // row-major, index j * (K + 1) + k
    probs: Vec<f64>,
}

impl NodeTypeDistribution {
    /// Build from rows indexed by in-degree `j = 0..=J`, columns by out-degree `k = 0..=K`.
    pub fn from_rows(max_in: usize, max_out: usize, rows: &[Vec<f64>]) -> Result<Self> {
        if max_in == 0 || max_out == 0 {
            return Err(Error::InvalidDistribution(
                "maximal in- and out-degree must be at least 1".into(),
            ));
        }
        let probs = check_rows(rows, max_in + 1, max_out + 1, "node-type matrix")?;
        check_probabilities(&probs, "node-type matrix")?;
        Ok(Self { max_in, max_out, probs })
    }

    /// Build from sparse `((j, k), probability)` entries; unspecified types get 0.
    pub fn from_entries(
        max_in: usize,
        max_out: usize,
        entries: &[((usize, usize), f64)],
    ) -> Result<Self> {
        let mut rows = vec![vec![0.0; max_out + 1]; max_in + 1];
        for &((j, k), p) in entries {
            if j > max_in || k > max_out {
                return Err(Error::InvalidDistribution(format!(
                    "node type ({j},{k}) outside [0..{max_in}]x[0..{max_out}]"
                )));
            }
            rows[j][k] += p;
        }
        Self::from_rows(max_in, max_out, &rows)
    }

    /// `J`
    pub fn max_in(&self) -> usize {
        self.max_in
    }

    /// `K`
    pub fn max_out(&self) -> usize {
        self.max_out
    }

    pub fn prob(&self, j: usize, k: usize) -> f64 {
        if j > self.max_in || k > self.max_out {
            return 0.0;
        }
        self.probs[j * (self.max_out + 1) + k]
    }

    /// Row-major probabilities, index `j * (K + 1) + k`.
    pub fn as_slice(&self) -> &[f64] {
        &self.probs
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.probs.chunks(self.max_out + 1).map(<[f64]>::to_vec).collect()
    }

    /// In-degree marginal `p_j^-`, indexed `0..=J`.
    pub fn in_marginal(&self) -> Vec<f64> {
        self.probs
            .chunks(self.max_out + 1)
            .map(|row| row.iter().sum())
            .collect()
    }

    /// Out-degree marginal `p_k^+`, indexed `0..=K`.
    pub fn out_marginal(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.max_out + 1];
        for row in self.probs.chunks(self.max_out + 1) {
            for (k, &p) in row.iter().enumerate() {
                out[k] += p;
            }
        }
        out
    }

    /// `(in_marginal, out_marginal)`
    pub fn marginals(&self) -> (Vec<f64>, Vec<f64>) {
        (self.in_marginal(), self.out_marginal())
    }

    /// Mean degree `z`.
    ///
    /// Fails when the mean out-degree and mean in-degree disagree by more than
    /// [`STRUCTURAL_TOL`], or when `z` is not positive.
    pub fn mean_degree(&self) -> Result<f64> {
        let mean_out = weighted_mean(&self.out_marginal());
        let mean_in = weighted_mean(&self.in_marginal());
        if (mean_out - mean_in).abs() > STRUCTURAL_TOL {
            return Err(Error::Balance { mean_out, mean_in });
        }
        if mean_out <= 0.0 {
            return Err(Error::ZeroDegree);
        }
        Ok(mean_out)
    }

    /// `p^r_{k'} = Σ_j j p_{j,k'}`: expected in-degree mass carried by nodes of out-degree `k'`.
    pub fn in_mass_by_out_degree(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.max_out + 1];
        for (j, row) in self.probs.chunks(self.max_out + 1).enumerate() {
            for (k, &p) in row.iter().enumerate() {
                out[k] += j as f64 * p;
            }
        }
        out
    }
}

fn weighted_mean(marginal: &[f64]) -> f64 {
    marginal.iter().enumerate().map(|(d, &p)| d as f64 * p).sum()
}

/// Joint distribution `Q = (q_{k,j})` of edge types over `[1..K] x [1..J]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeTypeDistribution {
    max_in: usize,
    max_out: usize,
    // row-major, index (k - 1) * J + (j - 1)
    probs: Vec<f64>,
}

impl EdgeTypeDistribution {
    /// Build from rows indexed by source out-degree `k = 1..=K`, columns by target in-degree `j = 1..=J`.
    pub fn from_rows(max_in: usize, max_out: usize, rows: &[Vec<f64>]) -> Result<Self> {
        if max_in == 0 || max_out == 0 {
            return Err(Error::InvalidDistribution(
                "maximal in- and out-degree must be at least 1".into(),
            ));
        }
        let probs = check_rows(rows, max_out, max_in, "edge-type matrix")?;
        check_probabilities(&probs, "edge-type matrix")?;
        Ok(Self { max_in, max_out, probs })
    }

    pub fn from_entries(
        max_in: usize,
        max_out: usize,
        entries: &[((usize, usize), f64)],
    ) -> Result<Self> {
        let mut rows = vec![vec![0.0; max_in]; max_out];
        for &((k, j), q) in entries {
            if k == 0 || j == 0 || k > max_out || j > max_in {
                return Err(Error::InvalidDistribution(format!(
                    "edge type ({k},{j}) outside [1..{max_out}]x[1..{max_in}]"
                )));
            }
            rows[k - 1][j - 1] += q;
        }
        Self::from_rows(max_in, max_out, &rows)
    }

    /// Skips the structural sum check. Used by copula construction, which
    /// guarantees the sum up to accumulated rounding.
    pub(crate) fn from_flat_unchecked(max_in: usize, max_out: usize, probs: Vec<f64>) -> Self {
        debug_assert_eq!(probs.len(), max_in * max_out);
        Self { max_in, max_out, probs }
    }

    pub fn max_in(&self) -> usize {
        self.max_in
    }

    pub fn max_out(&self) -> usize {
        self.max_out
    }

    /// `q_{k,j}`; zero outside `[1..K] x [1..J]`.
    pub fn prob(&self, k: usize, j: usize) -> f64 {
        if k == 0 || j == 0 || k > self.max_out || j > self.max_in {
            return 0.0;
        }
        self.probs[(k - 1) * self.max_in + (j - 1)]
    }

    /// Row-major probabilities, index `(k - 1) * J + (j - 1)`.
    pub fn as_slice(&self) -> &[f64] {
        &self.probs
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.probs.chunks(self.max_in).map(<[f64]>::to_vec).collect()
    }

    /// `q_k^+`, indexed `0..=K` with index 0 always zero.
    pub fn out_marginal(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.max_out + 1];
        for (k, row) in self.probs.chunks(self.max_in).enumerate() {
            out[k + 1] = row.iter().sum();
        }
        out
    }

    /// `q_j^-`, indexed `0..=J` with index 0 always zero.
    pub fn in_marginal(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.max_in + 1];
        for row in self.probs.chunks(self.max_in) {
            for (j, &q) in row.iter().enumerate() {
                out[j + 1] += q;
            }
        }
        out
    }
}

/// Which side of the consistency identity failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    /// `q_k^+ = k p_k^+ / z` (or the source marginal of a variant distribution).
    Out,
    /// `q_j^- = j p_j^- / z` (or the target marginal of a variant distribution).
    In,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub side: Side,
    pub degree: usize,
    pub actual: f64,
    pub expected: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_consistent(&self) -> bool {
        self.violations.is_empty()
    }

    pub(crate) fn check(&mut self, side: Side, degree: usize, actual: f64, expected: f64, tol: f64) {
        if (actual - expected).abs() > tol {
            self.violations.push(Violation { side, degree, actual, expected });
        }
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "consistent");
        }
        let parts: Vec<String> = self
            .violations
            .iter()
            .map(|v| {
                let side = match v.side {
                    Side::Out => "out",
                    Side::In => "in",
                };
                format!("{side}-degree {}: {} != {}", v.degree, v.actual, v.expected)
            })
            .collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// Check `q_k^+ = k p_k^+ / z` for `k ∈ [1..K]` and `q_j^- = j p_j^- / z` for `j ∈ [1..J]`.
///
/// Dimension mismatches between `P` and `Q` are reported as violations
/// against the missing degrees.
pub fn validate_consistency(
    p: &NodeTypeDistribution,
    q: &EdgeTypeDistribution,
    tol: f64,
) -> Result<ValidationReport> {
    let z = p.mean_degree()?;
    let (p_in, p_out) = p.marginals();
    let (q_out, q_in) = (q.out_marginal(), q.in_marginal());

    let mut report = ValidationReport::default();
    for k in 1..=p.max_out().max(q.max_out()) {
        let actual = q_out.get(k).copied().unwrap_or(0.0);
        let expected = k as f64 * p_out.get(k).copied().unwrap_or(0.0) / z;
        report.check(Side::Out, k, actual, expected, tol);
    }
    for j in 1..=p.max_in().max(q.max_in()) {
        let actual = q_in.get(j).copied().unwrap_or(0.0);
        let expected = j as f64 * p_in.get(j).copied().unwrap_or(0.0) / z;
        report.check(Side::In, j, actual, expected, tol);
    }
    Ok(report)
}
