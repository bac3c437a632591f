//! Fixtures shared by the integration tests.
#![allow(dead_code)]

use acgraph::copula::{calibrate_lambda, q_from_copula, rho_bounds};
use acgraph::variant::OutOutEdgeDistribution;
use acgraph::{Copula, EdgeTypeDistribution, NodeTypeDistribution};
use rand::Rng;

/// Nodes of type (2,2) with probability `p`, (4,4) otherwise.
pub fn p_diag(p: f64) -> NodeTypeDistribution {
    NodeTypeDistribution::from_entries(4, 4, &[((2, 2), p), ((4, 4), 1.0 - p)]).unwrap()
}

/// The closed-form edge-type matrix for `p_diag(p)` with diagonal weight
/// `q`, written out directly rather than through any copula:
/// `1/(2-p) [[3p+q-2, 2-2p-q], [2-2p-q, q]]` on degrees {2, 4}.
pub fn q_closed_form(p: f64, q: f64) -> EdgeTypeDistribution {
    let s = 1.0 / (2.0 - p);
    EdgeTypeDistribution::from_entries(
        4,
        4,
        &[
            ((2, 2), s * (3.0 * p + q - 2.0)),
            ((2, 4), s * (2.0 - 2.0 * p - q)),
            ((4, 2), s * (2.0 - 2.0 * p - q)),
            ((4, 4), s * q),
        ],
    )
    .unwrap()
}

/// Diagonal weights from the worked example, with their assortativity `3q - 2`.
pub const WORKED_Q: [f64; 6] = [1.0, 14.0 / 15.0, 13.0 / 15.0, 0.8, 2.0 / 3.0, 0.5];

/// Out-out matrix for `p_diag(0.5)` with independent endpoints.
pub fn qv_independent() -> OutOutEdgeDistribution {
    let (a, b) = (1.0 / 3.0, 2.0 / 3.0);
    OutOutEdgeDistribution::from_entries(4, &[((2, 2), a * a), ((2, 4), a * b), ((4, 2), b * a), ((4, 4), b * b)])
        .unwrap()
}

/// Out-out matrix for `p_diag(0.5)` where every edge joins equal out-degrees.
pub fn qv_diagonal() -> OutOutEdgeDistribution {
    OutOutEdgeDistribution::from_entries(4, &[((2, 2), 1.0 / 3.0), ((4, 4), 2.0 / 3.0)]).unwrap()
}

/// A random balanced node-type distribution. A symmetric `m x m` block with
/// random zero cells is embedded in a `(J+1) x (K+1)` matrix with
/// `J, K >= m - 1`; symmetry makes mean in- and out-degree equal, and the
/// padding adds all-zero rows and columns.
pub fn random_node_types<R: Rng>(rng: &mut R) -> NodeTypeDistribution {
    loop {
        let m = rng.random_range(2..=5);
        let max_in = m - 1 + rng.random_range(0..=1);
        let max_out = m - 1 + rng.random_range(0..=1);
        let mut block = vec![vec![0.0; m]; m];
        for a in 0..m {
            for b in a..m {
                let w = if rng.random_bool(0.35) { 0.0 } else { rng.random::<f64>() };
                block[a][b] = w;
                block[b][a] = w;
            }
        }
        let total: f64 = block.iter().flatten().sum();
        if total <= 0.0 {
            continue;
        }
        let mut rows = vec![vec![0.0; max_out + 1]; max_in + 1];
        for a in 0..m {
            for b in 0..m {
                rows[a][b] = block[a][b] / total;
            }
        }
        // Sometimes blend in mass `j0 : k0` on types (0, k0) and (j0, 0); both
        // contribute `j0 k0` to the mean degree, so balance is kept while the
        // in- and out-marginals stop being mirror images.
        if rng.random_bool(0.4) {
            let beta = rng.random_range(0.1..0.6);
            let (j0, k0) = (rng.random_range(1..=max_in), rng.random_range(1..=max_out));
            let w = (j0 + k0) as f64;
            rows.iter_mut().flatten().for_each(|v| *v *= 1.0 - beta);
            rows[0][k0] += beta * j0 as f64 / w;
            rows[j0][0] += beta * k0 as f64 / w;
        }
        // Renormalize exactly to absorb rounding in the division.
        let sum: f64 = rows.iter().flatten().sum();
        rows[0][0] += 1.0 - sum;
        if rows[0][0] < 0.0 {
            continue;
        }
        let Ok(p) = NodeTypeDistribution::from_rows(max_in, max_out, &rows) else { continue };
        if p.mean_degree().is_ok() {
            return p;
        }
    }
}

/// A consistent edge-type distribution for `p`: a calibrated mixture at a
/// random attainable `rho` when the bounds exist, else a random mixture
/// weight. Returns the target `rho` when one was used.
pub fn random_edge_types<R: Rng>(p: &NodeTypeDistribution, rng: &mut R) -> (EdgeTypeDistribution, Option<f64>) {
    match rho_bounds(p) {
        Ok((lo, hi)) => {
            let rho = lo + (hi - lo) * rng.random::<f64>();
            (calibrate_lambda(p, rho).unwrap().1, Some(rho))
        }
        Err(_) => {
            let lambda = rng.random::<f64>();
            (q_from_copula(p, &Copula::mixture(lambda).unwrap()).unwrap(), None)
        }
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn median(xs: &mut [f64]) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}
