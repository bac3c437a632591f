//! Edge-type distributions built from copulas, and the assortativity coefficient.
//!
//! With marginal CDFs `Q⁺(k)`, `Q⁻(j)` fixed by `P`, any 2-copula `C` induces
//!
//! ```text
//! q_{k,j} = C(Q⁺(k), Q⁻(j)) + C(Q⁺(k-1), Q⁻(j-1)) - C(Q⁺(k), Q⁻(j-1)) - C(Q⁺(k-1), Q⁻(j))
//! ```
//!
//! The lower and upper Fréchet bounds give the extreme assortativity values,
//! and because the covariance is linear in `C`, the mixture `λW + (1-λ)M`
//! reaches any value in between with `λ` in closed form.

use serde::{Deserialize, Serialize};

use crate::dist::{EdgeTypeDistribution, NodeTypeDistribution};
use crate::error::{Error, Result};

/// Negative entries with magnitude at most this are rounding noise and are clamped to zero.
pub const CLAMP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Copula {
    /// `W(u, v) = max(u + v - 1, 0)`
    FrechetLower,
    /// `M(u, v) = min(u, v)`
    FrechetUpper,
    /// `Π(u, v) = u v`
    Independence,
    /// `λ W + (1 - λ) M`
    Mixture { lambda: f64 },
}

impl Copula {
    pub fn mixture(lambda: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::Validation(format!("mixture weight {lambda} outside [0, 1]")));
        }
        Ok(Copula::Mixture { lambda })
    }

    pub fn evaluate(&self, u1: f64, u2: f64) -> f64 {
        let lower = || (u1 + u2 - 1.0).max(0.0);
        let upper = || u1.min(u2);
        match *self {
            Copula::FrechetLower => lower(),
            Copula::FrechetUpper => upper(),
            Copula::Independence => u1 * u2,
            Copula::Mixture { lambda } => lambda * lower() + (1.0 - lambda) * upper(),
        }
    }
}

/// Cumulative distribution functions of the degree-weighted marginals.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalCdfs {
    /// `Q⁺(k) = (1/z) Σ_{k' ≤ k} k' p_{k'}^+` for `k = 0..=K`.
    pub out_cdf: Vec<f64>,
    /// `Q⁻(j) = (1/z) Σ_{j' ≤ j} j' p_{j'}^-` for `j = 0..=J`.
    pub in_cdf: Vec<f64>,
}

fn degree_weighted_cdf(marginal: &[f64], z: f64) -> Vec<f64> {
    let mut acc = 0.0;
    marginal
        .iter()
        .enumerate()
        .map(|(d, &p)| {
            acc += d as f64 * p;
            acc / z
        })
        .collect()
}

pub fn marginal_cdfs(p: &NodeTypeDistribution) -> Result<MarginalCdfs> {
    let z = p.mean_degree()?;
    let (p_in, p_out) = p.marginals();
    Ok(MarginalCdfs {
        out_cdf: degree_weighted_cdf(&p_out, z),
        in_cdf: degree_weighted_cdf(&p_in, z),
    })
}

/// Edge-type distribution induced by `copula` on the marginals fixed by `p`.
pub fn q_from_copula(p: &NodeTypeDistribution, copula: &Copula) -> Result<EdgeTypeDistribution> {
    let cdfs = marginal_cdfs(p)?;
    let (max_in, max_out) = (p.max_in(), p.max_out());
    let (fo, fi) = (&cdfs.out_cdf, &cdfs.in_cdf);
    let c = |u1: f64, u2: f64| copula.evaluate(u1, u2);

    let mut probs = Vec::with_capacity(max_in * max_out);
    for k in 1..=max_out {
        for j in 1..=max_in {
            let mass = c(fo[k], fi[j]) + c(fo[k - 1], fi[j - 1]) - c(fo[k], fi[j - 1]) - c(fo[k - 1], fi[j]);
            if mass < -CLAMP_TOL {
                return Err(Error::InvalidDistribution(format!(
                    "copula produced negative mass {mass} at edge type ({k},{j})"
                )));
            }
            probs.push(mass.max(0.0));
        }
    }
    Ok(EdgeTypeDistribution::from_flat_unchecked(max_in, max_out, probs))
}

fn variance(marginal: &[f64]) -> f64 {
    let (mut m1, mut m2) = (0.0, 0.0);
    for (d, &q) in marginal.iter().enumerate() {
        let d = d as f64;
        m1 += d * q;
        m2 += d * d * q;
    }
    (m2 - m1 * m1).max(0.0)
}

fn marginal_scales(q_out: &[f64], q_in: &[f64]) -> Result<f64> {
    let (v_out, v_in) = (variance(q_out), variance(q_in));
    // Relative to the squared support width, so that rounding residue next
    // to a point mass (entries ~1e-17) does not count as spread.
    let eps = 1e-12 * (q_out.len().max(q_in.len()) as f64).powi(2);
    if v_out <= eps || v_in <= eps {
        return Err(Error::DegenerateMarginal);
    }
    Ok((v_out * v_in).sqrt())
}

/// Pearson correlation of `(k, j)` under `q`.
pub fn assortativity_coefficient(q: &EdgeTypeDistribution) -> Result<f64> {
    let (q_out, q_in) = (q.out_marginal(), q.in_marginal());
    let scale = marginal_scales(&q_out, &q_in)?;
    let mut cov = 0.0;
    for k in 1..=q.max_out() {
        for j in 1..=q.max_in() {
            cov += (k * j) as f64 * (q.prob(k, j) - q_out[k] * q_in[j]);
        }
    }
    Ok((cov / scale).clamp(-1.0, 1.0))
}

/// The same coefficient through Hoeffding's covariance identity, using the
/// joint CDF of `q` in place of the copula.
pub fn assortativity_hoeffding(q: &EdgeTypeDistribution) -> Result<f64> {
    let (q_out, q_in) = (q.out_marginal(), q.in_marginal());
    let scale = marginal_scales(&q_out, &q_in)?;
    let (max_in, max_out) = (q.max_in(), q.max_out());

    let cdf = |m: &[f64]| -> Vec<f64> {
        m.iter()
            .scan(0.0, |acc, &x| {
                *acc += x;
                Some(*acc)
            })
            .collect()
    };
    let (f_out, f_in) = (cdf(&q_out), cdf(&q_in));

    // joint[j] holds F(k, j) for the current k
    let mut joint = vec![0.0; max_in + 1];
    let mut cov = 0.0;
    for k in 1..=max_out {
        let mut row_acc = 0.0;
        for j in 1..=max_in {
            row_acc += q.prob(k, j);
            joint[j] += row_acc;
            cov += joint[j] - f_out[k] * f_in[j];
        }
    }
    Ok((cov / scale).clamp(-1.0, 1.0))
}

/// Assortativity of the edge-type distribution induced by `copula`, evaluated
/// directly on the copula via Hoeffding's identity.
pub fn assortativity_of_copula(p: &NodeTypeDistribution, copula: &Copula) -> Result<f64> {
    let cdfs = marginal_cdfs(p)?;
    let z = p.mean_degree()?;
    let (p_in, p_out) = p.marginals();
    let q_out: Vec<f64> = p_out.iter().enumerate().map(|(k, &x)| k as f64 * x / z).collect();
    let q_in: Vec<f64> = p_in.iter().enumerate().map(|(j, &x)| j as f64 * x / z).collect();
    let scale = marginal_scales(&q_out, &q_in)?;
    let mut cov = 0.0;
    for &u1 in &cdfs.out_cdf[1..] {
        for &u2 in &cdfs.in_cdf[1..] {
            cov += copula.evaluate(u1, u2) - u1 * u2;
        }
    }
    Ok((cov / scale).clamp(-1.0, 1.0))
}

/// Minimal and maximal attainable assortativity for `p`, from the lower and
/// upper Fréchet bounds.
pub fn rho_bounds(p: &NodeTypeDistribution) -> Result<(f64, f64)> {
    let min = assortativity_coefficient(&q_from_copula(p, &Copula::FrechetLower)?)?;
    let max = assortativity_coefficient(&q_from_copula(p, &Copula::FrechetUpper)?)?;
    Ok((min, max))
}

/// Mixture weight `λ` such that `λW + (1-λ)M` has assortativity `target`, and
/// the induced edge-type distribution.
pub fn calibrate_lambda(p: &NodeTypeDistribution, target: f64) -> Result<(f64, EdgeTypeDistribution)> {
    let (min, max) = rho_bounds(p)?;
    let slack = 1e-12;
    if !target.is_finite() || target < min - slack || target > max + slack {
        return Err(Error::OutOfRange { target, min, max });
    }
    let lambda = if max - min <= slack {
        0.0
    } else {
        ((max - target) / (max - min)).clamp(0.0, 1.0)
    };
    let q = q_from_copula(p, &Copula::Mixture { lambda })?;
    Ok((lambda, q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{validate_consistency, CONSISTENCY_TOL};

    fn p_diag(p: f64) -> NodeTypeDistribution {
        NodeTypeDistribution::from_entries(4, 4, &[((2, 2), p), ((4, 4), 1.0 - p)]).unwrap()
    }

    /// The closed-form 4x4 matrix for the diagonal two-type example.
    fn q_display(p: f64, q: f64) -> [[f64; 4]; 4] {
        let s = 1.0 / (2.0 - p);
        let mut m = [[0.0; 4]; 4];
        m[1][1] = s * (3.0 * p + q - 2.0);
        m[1][3] = s * (2.0 - 2.0 * p - q);
        m[3][1] = s * (2.0 - 2.0 * p - q);
        m[3][3] = s * q;
        m
    }

    fn assert_matrix(q: &EdgeTypeDistribution, expected: &[[f64; 4]; 4], tol: f64) {
        for k in 1..=4 {
            for j in 1..=4 {
                let (a, e) = (q.prob(k, j), expected[k - 1][j - 1]);
                assert!((a - e).abs() <= tol, "q[{k},{j}] = {a}, expected {e}");
            }
        }
    }

    #[test]
    fn evaluate_examples() {
        assert!((Copula::FrechetLower.evaluate(0.3, 0.9) - 0.2).abs() < 1e-15);
        assert_eq!(Copula::FrechetUpper.evaluate(0.3, 0.9), 0.3);
        assert!((Copula::Mixture { lambda: 0.4 }.evaluate(0.3, 0.9) - 0.26).abs() < 1e-15);
        assert!((Copula::Independence.evaluate(0.3, 0.9) - 0.27).abs() < 1e-15);
        assert!(Copula::mixture(1.5).is_err());
    }

    #[test]
    fn cdf_examples() {
        let c = marginal_cdfs(&p_diag(0.5)).unwrap();
        let expected = [0.0, 0.0, 1.0 / 3.0, 1.0 / 3.0, 1.0];
        for (a, e) in c.out_cdf.iter().zip(expected) {
            assert!((a - e).abs() < 1e-12);
        }
        assert_eq!(c.in_cdf, c.out_cdf);

        let unit = NodeTypeDistribution::from_entries(1, 1, &[((1, 1), 1.0)]).unwrap();
        let c = marginal_cdfs(&unit).unwrap();
        assert_eq!(c.out_cdf, vec![0.0, 1.0]);
        assert_eq!(c.in_cdf, vec![0.0, 1.0]);

        let c = marginal_cdfs(&p_diag(2.0 / 3.0)).unwrap();
        for (a, e) in c.out_cdf.iter().zip([0.0, 0.0, 0.5, 0.5, 1.0]) {
            assert!((a - e).abs() < 1e-12);
        }
    }

    #[test]
    fn builtin_copulas_on_diagonal_example() {
        let p = p_diag(0.5);
        let indep = q_from_copula(&p, &Copula::Independence).unwrap();
        assert_matrix(&indep, &q_display(0.5, 2.0 / 3.0), 1e-12);
        let upper = q_from_copula(&p, &Copula::FrechetUpper).unwrap();
        assert_matrix(&upper, &q_display(0.5, 1.0), 1e-12);
        let lower = q_from_copula(&p, &Copula::FrechetLower).unwrap();
        assert_matrix(&lower, &q_display(0.5, 0.5), 1e-12);
        for q in [&indep, &upper, &lower] {
            assert!(validate_consistency(&p, q, CONSISTENCY_TOL).unwrap().is_consistent());
        }
    }

    #[test]
    fn assortativity_examples() {
        let p = p_diag(0.5);
        let indep = q_from_copula(&p, &Copula::Independence).unwrap();
        assert!(assortativity_coefficient(&indep).unwrap().abs() < 1e-12);

        let mut rows = vec![vec![0.0; 4]; 4];
        let m = q_display(0.5, 14.0 / 15.0);
        for k in 0..4 {
            rows[k].copy_from_slice(&m[k]);
        }
        let q = EdgeTypeDistribution::from_rows(4, 4, &rows).unwrap();
        assert!((assortativity_coefficient(&q).unwrap() - 0.8).abs() < 1e-9);

        let point = EdgeTypeDistribution::from_entries(1, 1, &[((1, 1), 1.0)]).unwrap();
        assert!(matches!(assortativity_coefficient(&point), Err(Error::DegenerateMarginal)));
    }

    #[test]
    fn bounds_examples() {
        let (lo, hi) = rho_bounds(&p_diag(0.5)).unwrap();
        assert!((lo + 0.5).abs() < 1e-9 && (hi - 1.0).abs() < 1e-9);
        let (lo, hi) = rho_bounds(&p_diag(2.0 / 3.0)).unwrap();
        assert!((lo + 1.0).abs() < 1e-9 && (hi - 1.0).abs() < 1e-9);
        let point = NodeTypeDistribution::from_entries(2, 2, &[((2, 2), 1.0)]).unwrap();
        assert!(matches!(rho_bounds(&point), Err(Error::DegenerateMarginal)));
    }

    #[test]
    fn calibration_examples() {
        let p = p_diag(0.5);
        let (lambda, _) = calibrate_lambda(&p, 1.0).unwrap();
        assert!(lambda.abs() < 1e-12);
        let (lambda, _) = calibrate_lambda(&p, -0.5).unwrap();
        assert!((lambda - 1.0).abs() < 1e-12);
        let (lambda, q) = calibrate_lambda(&p, 0.4).unwrap();
        assert!((lambda - 0.4).abs() < 1e-12);
        assert_matrix(&q, &q_display(0.5, 0.8), 1e-12);
        assert!(matches!(calibrate_lambda(&p, -0.6), Err(Error::OutOfRange { .. })));
        assert!(matches!(calibrate_lambda(&p, 1.01), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn copula_route_matches_matrix_route() {
        let p = p_diag(0.3);
        for c in [Copula::FrechetLower, Copula::FrechetUpper, Copula::Independence, Copula::Mixture { lambda: 0.37 }] {
            let q = q_from_copula(&p, &c).unwrap();
            let a = assortativity_coefficient(&q).unwrap();
            let b = assortativity_of_copula(&p, &c).unwrap();
            let h = assortativity_hoeffding(&q).unwrap();
            assert!((a - b).abs() < 1e-9 && (a - h).abs() < 1e-9, "{c:?}: {a} {b} {h}");
        }
    }
}
