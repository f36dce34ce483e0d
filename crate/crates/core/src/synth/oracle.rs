//! Brute-force reference computations.
//!
//! Nothing here calls into `bftest`, `special` or `exnet`: Bayes factors are
//! obtained by adaptive Gauss–Kronrod quadrature of the marginal likelihood,
//! and centrality by a dense eigendecomposition of the teleported walk matrix.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("oracle input out of range: {0}")]
    Domain(String),
    #[error("quadrature did not reach tolerance (estimate {estimate}, error {error})")]
    Quadrature { estimate: f64, error: f64 },
    #[error("eigendecomposition failed: {0}")]
    Eigen(String),
}

/// Which alternative the oracle integrates over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sided {
    Two,
    Below,
    Above,
}

const MAX_N: u64 = 2000;
const MAX_INTERVALS: usize = 4000;
const REL_TOL: f64 = 1e-13;

// Gauss–Kronrod 7/15 nodes and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> (f64, f64) {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let sum = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * sum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * sum;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Globally adaptive Gauss–Kronrod integration over `[lo, hi]` with the
/// given interior break points.
pub fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, breaks: &[f64]) -> Result<f64, OracleError> {
    let mut points = vec![lo];
    points.extend(breaks.iter().copied().filter(|&b| b > lo && b < hi));
    points.push(hi);
    points.sort_by(f64::total_cmp);
    points.dedup();

    let mut intervals: Vec<(f64, f64, f64, f64)> = points
        .windows(2)
        .map(|w| {
            let (v, e) = gk15(&f, w[0], w[1]);
            (w[0], w[1], v, e)
        })
        .collect();
    loop {
        let total: f64 = intervals.iter().map(|i| i.2).sum();
        let error: f64 = intervals.iter().map(|i| i.3).sum();
        if error <= REL_TOL * total.abs() || error == 0.0 {
            return Ok(total);
        }
        if intervals.len() >= MAX_INTERVALS {
            return Err(OracleError::Quadrature { estimate: total, error });
        }
        let worst = intervals
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .3.total_cmp(&b.1 .3))
            .map(|(i, _)| i)
            .expect("non-empty");
        let (a, b, _, _) = intervals.swap_remove(worst);
        let mid = 0.5 * (a + b);
        let (v1, e1) = gk15(&f, a, mid);
        let (v2, e2) = gk15(&f, mid, b);
        intervals.push((a, mid, v1, e1));
        intervals.push((mid, b, v2, e2));
    }
}

/// `ln BF₁₀` of the binomial test by numerical integration of the marginal
/// likelihood under a Beta(a, b) prior (truncated for one-sided tests).
///
/// Requires `n <= 2000` and `a, b >= 1` so the integrand is bounded.
pub fn oracle_bf(n: u64, k: u64, p0: f64, prior: (f64, f64), sided: Sided) -> Result<f64, OracleError> {
    let (a, b) = prior;
    if n == 0 || n > MAX_N || k > n {
        return Err(OracleError::Domain(format!("n={n}, k={k}")));
    }
    if !(p0 > 0.0 && p0 < 1.0) || a < 1.0 || b < 1.0 {
        return Err(OracleError::Domain(format!("p0={p0}, prior=({a}, {b})")));
    }
    let (lo, hi) = match sided {
        Sided::Two => (0.0, 1.0),
        Sided::Below => (0.0, p0),
        Sided::Above => (p0, 1.0),
    };
    // unnormalized log posterior kernel p^(k+a-1) (1-p)^(n-k+b-1)
    let alpha = k as f64 + a - 1.0;
    let beta = (n - k) as f64 + b - 1.0;
    let log_kernel = |p: f64, al: f64, be: f64| -> f64 {
        let left = if al == 0.0 { 0.0 } else { al * p.ln() };
        let right = if be == 0.0 { 0.0 } else { be * (1.0 - p).ln() };
        left + right
    };
    let mode = |al: f64, be: f64| -> f64 {
        let m = if al + be > 0.0 { al / (al + be) } else { 0.5 };
        m.clamp(lo, hi)
    };
    let scaled_integral = |al: f64, be: f64| -> Result<f64, OracleError> {
        let m = mode(al, be);
        let peak = log_kernel(m, al, be);
        let width = ((m * (1.0 - m)).max(1e-12) / (al + be + 1.0)).sqrt();
        let breaks: Vec<f64> = [-8.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0].iter().map(|s| m + s * width).collect();
        let value = integrate(|p| (log_kernel(p, al, be) - peak).exp(), lo, hi, &breaks)?;
        Ok(value.ln() + peak)
    };
    let ln_marginal = scaled_integral(alpha, beta)?;
    let ln_prior_mass = scaled_integral(a - 1.0, b - 1.0)?;
    let ln_null = k as f64 * p0.ln() + (n - k) as f64 * (1.0 - p0).ln();
    Ok(ln_marginal - ln_prior_mass - ln_null)
}

/// Teleported walk matrix `G = d·Pᵀ + (1−d)/N·11ᵀ`, with `P` the
/// row-normalized weighted adjacency and dangling rows spread uniformly.
///
/// `edges` are `(source, target, weight)` over nodes `0..n`.
pub fn teleported_matrix(n: usize, edges: &[(usize, usize, f64)], damping: f64) -> DMatrix<f64> {
    let mut adj = DMatrix::<f64>::zeros(n, n);
    for &(s, t, w) in edges {
        adj[(s, t)] += w;
    }
    let mut g = DMatrix::<f64>::from_element(n, n, (1.0 - damping) / n as f64);
    for s in 0..n {
        let out: f64 = adj.row(s).sum();
        for t in 0..n {
            let step = if out > 0.0 { adj[(s, t)] / out } else { 1.0 / n as f64 };
            g[(t, s)] += damping * step;
        }
    }
    g
}

/// Dominant eigenvector of the teleported matrix, scaled to max 1.
///
/// The dominant eigenvalue is taken from the real Schur form; its
/// eigenvector is the null space of `G − λI`, read off the SVD.
pub fn oracle_centrality(n: usize, edges: &[(usize, usize, f64)], damping: f64) -> Result<Vec<f64>, OracleError> {
    if n == 0 || n > 50 {
        return Err(OracleError::Domain(format!("oracle supports 1..=50 nodes, got {n}")));
    }
    if n == 1 {
        return Ok(vec![1.0]);
    }
    let g = teleported_matrix(n, edges, damping);
    let eigenvalues = g.complex_eigenvalues();
    let lambda = eigenvalues
        .iter()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .ok_or_else(|| OracleError::Eigen("no eigenvalues".into()))?;
    if lambda.im.abs() > 1e-9 {
        return Err(OracleError::Eigen(format!("dominant eigenvalue {lambda} is not real")));
    }
    let shifted = &g - DMatrix::<f64>::identity(n, n) * lambda.re;
    let svd = shifted.svd(false, true);
    let v_t = svd.v_t.ok_or_else(|| OracleError::Eigen("svd produced no right vectors".into()))?;
    let (idx, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    let mut v: DVector<f64> = v_t.row(idx).transpose();
    if v.sum() < 0.0 {
        v = -v;
    }
    let max = v.max();
    if !(max > 0.0) {
        return Err(OracleError::Eigen("dominant eigenvector has no positive entries".into()));
    }
    Ok(v.iter().map(|x| (x / max).max(0.0)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrature_of_polynomial_and_peak() {
        let v = integrate(|x| x * x, 0.0, 1.0, &[]).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-15);
        let v = integrate(|x| (-(x - 0.3f64).powi(2) / 2e-6).exp(), 0.0, 1.0, &[0.3]).unwrap();
        let want = (2.0 * std::f64::consts::PI * 1e-6).sqrt();
        assert!((v / want - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bf_reference_values() {
        let v = oracle_bf(10, 5, 0.5, (1.0, 1.0), Sided::Two).unwrap().exp();
        assert!((v - 0.369_408_369_408_369_2).abs() < 1e-12);
        let v = oracle_bf(100, 50, 0.5, (1.0, 1.0), Sided::Two).unwrap().exp();
        assert!((v - 0.1244).abs() < 1e-4);
        let two = oracle_bf(100, 10, 0.5, (1.0, 1.0), Sided::Two).unwrap();
        let below = oracle_bf(100, 10, 0.5, (1.0, 1.0), Sided::Below).unwrap();
        assert!((below - two - 2f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn bf_symmetric_cases() {
        for k in [0u64, 3, 17, 40] {
            let a = oracle_bf(40, k, 0.5, (1.0, 1.0), Sided::Two).unwrap();
            let b = oracle_bf(40, 40 - k, 0.5, (1.0, 1.0), Sided::Two).unwrap();
            assert!((a - b).abs() < 1e-11);
        }
    }

    #[test]
    fn bf_domain_checks() {
        assert!(oracle_bf(0, 0, 0.5, (1.0, 1.0), Sided::Two).is_err());
        assert!(oracle_bf(2001, 3, 0.5, (1.0, 1.0), Sided::Two).is_err());
        assert!(oracle_bf(10, 3, 0.5, (0.5, 1.0), Sided::Two).is_err());
    }

    #[test]
    fn centrality_uniform_on_complete_graph() {
        let mut edges = vec![];
        for s in 0..4 {
            for t in 0..4 {
                if s != t {
                    edges.push((s, t, 1.0));
                }
            }
        }
        let v = oracle_centrality(4, &edges, 0.85).unwrap();
        assert!(v.iter().all(|x| (x - 1.0).abs() < 1e-12));
    }

    #[test]
    fn centrality_star_hub_maximal() {
        let edges: Vec<_> = (1..6).map(|s| (s, 0, 1.0)).collect();
        let v = oracle_centrality(6, &edges, 0.85).unwrap();
        assert_eq!(v[0], 1.0);
        assert!(v[1..].iter().all(|&x| x < 1.0));
    }
}
