//! Logistic regression of auction access on career features, gender and
//! co-exhibition gender.
//!
//! Numeric features enter as `(ln x − min ln x)/(max ln x − min ln x)` over
//! the fitted sample; categorical blocks are dummy coded against a baseline
//! of men and `co_man`.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;
use thiserror::Error;

use crate::careers::CoGender;
use crate::corpus::Gender;

/// Critical value used for the 95% Wald intervals.
pub const WALD_Z: f64 = 1.96;

#[derive(Debug, Error, PartialEq)]
pub enum RegressError {
    #[error("design has no usable observations")]
    Empty,
    #[error("design is rank deficient: column `{column}` is collinear with {with:?}")]
    RankDeficient { column: String, with: Vec<String> },
    #[error("coefficients diverge (norm {norm:.3} after {iterations} iterations); outcomes look perfectly separated")]
    Separation { norm: f64, iterations: usize },
    #[error("no convergence after {iterations} iterations (gradient L-inf {gradient:e})")]
    NonConvergence { iterations: usize, gradient: f64 },
    #[error("Hessian is not positive definite at iteration {0}")]
    Singular(usize),
    #[error("models fitted on different samples ({0:?})")]
    MismatchedSamples(Vec<usize>),
    #[error("dimension mismatch: {0}")]
    Shape(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModelId {
    /// Career features only.
    M1,
    /// Adds gender.
    M2,
    /// Adds co-exhibition gender.
    M3,
    /// Gender × co-exhibition gender interaction instead of main effects.
    M4,
}

impl ModelId {
    pub const ALL: [ModelId; 4] = [ModelId::M1, ModelId::M2, ModelId::M3, ModelId::M4];

    pub fn number(self) -> u8 {
        self as u8 + 1
    }

    pub fn from_number(n: u8) -> Option<Self> {
        Self::ALL.get(usize::from(n).checked_sub(1)?).copied()
    }

    /// Column names after the intercept and the numeric features.
    pub fn dummy_columns(self) -> &'static [&'static str] {
        match self {
            Self::M1 => &[],
            Self::M2 => &["woman"],
            Self::M3 => &["woman", "co_neutral", "co_woman"],
            Self::M4 => &["woman:co_neutral", "woman:co_man", "woman:co_woman", "man:co_neutral", "man:co_woman"],
        }
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Model {}", self.number())
    }
}

pub const NUMERIC_FEATURES: [&str; 2] = ["exhibitions_per_year", "career_length"];

/// One artist's raw regression inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub artist_id: String,
    pub auctioned: bool,
    pub exhibitions_per_year: f64,
    pub career_length: f64,
    pub gender: Gender,
    pub co_gender: CoGender,
}

/// Stored log-min-max constants of one numeric feature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transform {
    pub feature: String,
    pub ln_min: f64,
    pub ln_max: f64,
}

impl Transform {
    fn apply(&self, x: f64) -> (f64, bool) {
        let v = x.ln();
        ((v - self.ln_min) / (self.ln_max - self.ln_min), v < self.ln_min || v > self.ln_max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    pub model: Option<ModelId>,
    pub columns: Vec<String>,
    /// One row per observation.
    pub x: DMatrix<f64>,
    pub y: DVector<f64>,
    pub artist_ids: Vec<String>,
    pub transforms: Vec<Transform>,
    pub excluded: Vec<(String, String)>,
    pub warnings: Vec<String>,
}

impl Design {
    /// Wraps an already encoded matrix.
    pub fn from_matrix(columns: Vec<String>, x: DMatrix<f64>, y: DVector<f64>) -> Result<Self, RegressError> {
        if x.ncols() != columns.len() || x.nrows() != y.len() {
            return Err(RegressError::Shape(format!(
                "{}x{} matrix, {} names, {} outcomes",
                x.nrows(),
                x.ncols(),
                columns.len(),
                y.len()
            )));
        }
        let artist_ids = (0..x.nrows()).map(|i| i.to_string()).collect();
        Ok(Self { model: None, columns, x, y, artist_ids, transforms: vec![], excluded: vec![], warnings: vec![] })
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }
}

fn numeric_value(o: &Observation, feature: &str) -> f64 {
    match feature {
        "exhibitions_per_year" => o.exhibitions_per_year,
        "career_length" => o.career_length,
        _ => unreachable!("unknown numeric feature {feature}"),
    }
}

fn dummy_value(column: &str, gender: Gender, co: CoGender) -> f64 {
    let is = |b: bool| if b { 1.0 } else { 0.0 };
    match column {
        "woman" => is(gender == Gender::Woman),
        "co_neutral" => is(co == CoGender::CoNeutral),
        "co_woman" => is(co == CoGender::CoWoman),
        _ => {
            let (g, c) = column.split_once(':').expect("interaction column");
            is(gender.as_str() == g && co.as_str() == c)
        }
    }
}

/// Encodes one observation against fixed columns and transforms; the flag
/// reports whether any numeric feature falls outside its training range.
pub fn encode_row(columns: &[String], transforms: &[Transform], input: &Observation) -> (Vec<f64>, bool) {
    let mut extrapolated = false;
    let row = columns
        .iter()
        .map(|c| {
            if c == "intercept" {
                1.0
            } else if let Some(t) = transforms.iter().find(|t| &t.feature == c) {
                let (v, out) = t.apply(numeric_value(input, c));
                extrapolated |= out;
                v
            } else {
                dummy_value(c, input.gender, input.co_gender)
            }
        })
        .collect();
    (row, extrapolated)
}

/// Builds the design matrix of a model over the given observations.
///
/// Artists without an assigned co-exhibition gender are left out for every
/// model so that all four fits share one sample.
pub fn encode(observations: &[Observation], model: ModelId) -> Result<Design, RegressError> {
    let mut excluded = Vec::new();
    let mut kept: Vec<&Observation> = Vec::new();
    for o in observations {
        if o.co_gender == CoGender::Unassigned {
            excluded.push((o.artist_id.clone(), "co-exhibition gender unassigned".to_string()));
        } else if let Some(f) = NUMERIC_FEATURES.iter().find(|f| !(numeric_value(o, f) > 0.0)) {
            excluded.push((o.artist_id.clone(), format!("{f} is not positive")));
        } else {
            kept.push(o);
        }
    }
    if kept.is_empty() {
        return Err(RegressError::Empty);
    }

    let mut warnings = Vec::new();
    let mut transforms = Vec::new();
    for f in NUMERIC_FEATURES {
        let logs = kept.iter().map(|o| numeric_value(o, f).ln());
        let (lo, hi) = logs.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        if lo == hi {
            warnings.push(format!("{f} is constant over the sample and was dropped"));
        } else {
            transforms.push(Transform { feature: f.to_string(), ln_min: lo, ln_max: hi });
        }
    }

    let mut columns = vec!["intercept".to_string()];
    columns.extend(transforms.iter().map(|t| t.feature.clone()));
    columns.extend(model.dummy_columns().iter().map(|s| s.to_string()));

    let mut x = DMatrix::zeros(kept.len(), columns.len());
    for (i, o) in kept.iter().enumerate() {
        let (row, _) = encode_row(&columns, &transforms, o);
        for (j, v) in row.into_iter().enumerate() {
            x[(i, j)] = v;
        }
    }
    let y = DVector::from_iterator(kept.len(), kept.iter().map(|o| if o.auctioned { 1.0 } else { 0.0 }));
    Ok(Design {
        model: Some(model),
        columns,
        x,
        y,
        artist_ids: kept.iter().map(|o| o.artist_id.clone()).collect(),
        transforms,
        excluded,
        warnings,
    })
}

// ln(1 + e^x) without overflow
fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Bernoulli log-likelihood of coefficients `beta`.
pub fn log_likelihood(x: &DMatrix<f64>, y: &DVector<f64>, beta: &DVector<f64>) -> f64 {
    let eta = x * beta;
    eta.iter().zip(y.iter()).map(|(&e, &yi)| if yi > 0.5 { -softplus(-e) } else { -softplus(e) }).sum()
}

/// Gradient of [`log_likelihood`], `Xᵀ(y − p)`.
pub fn score(x: &DMatrix<f64>, y: &DVector<f64>, beta: &DVector<f64>) -> DVector<f64> {
    let eta = x * beta;
    let resid = DVector::from_iterator(y.len(), eta.iter().zip(y.iter()).map(|(&e, &yi)| yi - sigmoid(e)));
    x.transpose() * resid
}

fn information(x: &DMatrix<f64>, beta: &DVector<f64>) -> DMatrix<f64> {
    let eta = x * beta;
    let mut weighted = x.clone();
    for (i, &e) in eta.iter().enumerate() {
        let p = sigmoid(e);
        let w = p * (1.0 - p);
        weighted.row_mut(i).scale_mut(w);
    }
    x.transpose() * weighted
}

/// Finds a column that lies in the span of the earlier ones.
fn check_rank(design: &Design) -> Result<(), RegressError> {
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let mut owners: Vec<usize> = Vec::new();
    for j in 0..design.x.ncols() {
        let col = design.x.column(j).into_owned();
        let norm = col.norm();
        let mut resid = col.clone();
        let mut involved = Vec::new();
        for (q, &owner) in basis.iter().zip(&owners) {
            let c = q.dot(&col);
            if c.abs() > 1e-9 * norm.max(1.0) {
                involved.push(design.columns[owner].clone());
            }
            resid -= q * c;
        }
        let r = resid.norm();
        if norm == 0.0 || r <= 1e-9 * norm {
            return Err(RegressError::RankDeficient { column: design.columns[j].clone(), with: involved });
        }
        basis.push(resid / r);
        owners.push(j);
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitConfig {
    /// Bound on the L-inf norm of the score at the optimum.
    pub tolerance: f64,
    pub max_iter: usize,
    /// Coefficient vectors longer than this are treated as diverging.
    pub max_coefficient_norm: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self { tolerance: 1e-8, max_iter: 100, max_coefficient_norm: 30.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub name: String,
    pub coef: f64,
    pub odds_ratio: f64,
    pub se: Option<f64>,
    pub z: Option<f64>,
    pub p_value: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
}

impl Coefficient {
    pub fn new(name: &str, coef: f64, se: Option<f64>) -> Self {
        let z = se.map(|s| coef / s);
        Self {
            name: name.to_string(),
            coef,
            odds_ratio: coef.exp(),
            se,
            z,
            p_value: z.map(|z| erfc(z.abs() / std::f64::consts::SQRT_2)),
            ci_low: se.map(|s| coef - WALD_Z * s),
            ci_high: se.map(|s| coef + WALD_Z * s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionFit {
    pub model: Option<ModelId>,
    pub columns: Vec<String>,
    pub coefficients: Vec<Coefficient>,
    pub transforms: Vec<Transform>,
    pub log_likelihood: f64,
    pub bic: f64,
    pub n: usize,
    /// Number of non-intercept parameters.
    pub df: usize,
    pub iterations: usize,
    pub gradient_norm: f64,
    /// Log-likelihood after each accepted Newton step, starting from zero coefficients.
    pub log_likelihood_trace: Vec<f64>,
}

impl RegressionFit {
    /// A fit carrying externally supplied coefficients, for prediction only.
    pub fn from_coefficients(model: Option<ModelId>, coefficients: &[(&str, f64)], transforms: Vec<Transform>) -> Self {
        Self {
            model,
            columns: coefficients.iter().map(|(n, _)| n.to_string()).collect(),
            coefficients: coefficients.iter().map(|&(n, c)| Coefficient::new(n, c, None)).collect(),
            transforms,
            log_likelihood: f64::NAN,
            bic: f64::NAN,
            n: 0,
            df: coefficients.len().saturating_sub(1),
            iterations: 0,
            gradient_norm: f64::NAN,
            log_likelihood_trace: vec![],
        }
    }

    pub fn coefficient(&self, name: &str) -> Option<&Coefficient> {
        self.coefficients.iter().find(|c| c.name == name)
    }

    pub fn beta(&self) -> DVector<f64> {
        DVector::from_iterator(self.coefficients.len(), self.coefficients.iter().map(|c| c.coef))
    }
}

/// Maximum-likelihood fit by Newton's method with step halving.
pub fn fit(design: &Design, cfg: &FitConfig) -> Result<RegressionFit, RegressError> {
    let (n, k) = design.x.shape();
    if n == 0 {
        return Err(RegressError::Empty);
    }
    check_rank(design)?;

    let (x, y) = (&design.x, &design.y);
    let mut beta = DVector::zeros(k);
    let mut ll = log_likelihood(x, y, &beta);
    let mut trace = vec![ll];
    for iteration in 1..=cfg.max_iter {
        let g = score(x, y, &beta);
        let h = information(x, &beta);
        let chol = h.cholesky().ok_or(RegressError::Singular(iteration))?;
        let step = chol.solve(&g);
        let gnorm = g.amax();
        if gnorm < cfg.tolerance && step.amax() < 1e-6 {
            let cov = chol.inverse();
            let coefficients = design
                .columns
                .iter()
                .enumerate()
                .map(|(j, name)| Coefficient::new(name, beta[j], Some(cov[(j, j)].sqrt())))
                .collect();
            return Ok(RegressionFit {
                model: design.model,
                columns: design.columns.clone(),
                coefficients,
                transforms: design.transforms.clone(),
                log_likelihood: ll,
                bic: k as f64 * (n as f64).ln() - 2.0 * ll,
                n,
                df: k - 1,
                iterations: iteration - 1,
                gradient_norm: gnorm,
                log_likelihood_trace: trace,
            });
        }

        // near the optimum the likelihood gain falls below summation rounding
        let slack = 1e-12 * ll.abs().max(1.0);
        let mut t = 1.0;
        let mut candidate = &beta + &step;
        let mut cand_ll = log_likelihood(x, y, &candidate);
        for _ in 0..60 {
            if cand_ll >= ll - slack {
                break;
            }
            t *= 0.5;
            candidate = &beta + &step * t;
            cand_ll = log_likelihood(x, y, &candidate);
        }
        if cand_ll < ll - slack {
            // no ascent along the Newton direction: we are at the optimum up to rounding
            candidate = beta.clone();
            cand_ll = ll;
        }
        beta = candidate;
        ll = cand_ll;
        trace.push(ll);
        if beta.norm() > cfg.max_coefficient_norm {
            return Err(RegressError::Separation { norm: beta.norm(), iterations: iteration });
        }
    }
    Err(RegressError::NonConvergence { iterations: cfg.max_iter, gradient: score(x, y, &beta).amax() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub probability: f64,
    pub linear_predictor: f64,
    /// A numeric feature lies outside the training range.
    pub extrapolated: bool,
}

/// Access probability for raw (untransformed) inputs.
pub fn predict(fit: &RegressionFit, input: &Observation) -> Prediction {
    let (row, extrapolated) = encode_row(&fit.columns, &fit.transforms, input);
    let eta: f64 = row.iter().zip(&fit.coefficients).map(|(x, c)| x * c.coef).sum();
    Prediction { probability: sigmoid(eta), linear_predictor: eta, extrapolated }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub label: String,
    pub n: usize,
    pub df: usize,
    pub log_likelihood: f64,
    pub bic: f64,
    /// Relative to the first fit.
    pub delta_bic: f64,
}

pub fn compare(fits: &[&RegressionFit]) -> Result<Vec<ComparisonRow>, RegressError> {
    let ns: Vec<usize> = fits.iter().map(|f| f.n).collect();
    if ns.windows(2).any(|w| w[0] != w[1]) {
        return Err(RegressError::MismatchedSamples(ns));
    }
    let Some(first) = fits.first() else { return Ok(vec![]) };
    Ok(fits
        .iter()
        .enumerate()
        .map(|(i, f)| ComparisonRow {
            label: f.model.map(|m| m.to_string()).unwrap_or_else(|| format!("fit {}", i + 1)),
            n: f.n,
            df: f.df,
            log_likelihood: f.log_likelihood,
            bic: f.bic,
            delta_bic: f.bic - first.bic,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn obs(id: &str, auctioned: bool, epy: f64, cl: f64, gender: Gender, co: CoGender) -> Observation {
        Observation {
            artist_id: id.into(),
            auctioned,
            exhibitions_per_year: epy,
            career_length: cl,
            gender,
            co_gender: co,
        }
    }

    fn small_sample() -> Vec<Observation> {
        vec![
            obs("a", true, 1.0, 1.0, Gender::Man, CoGender::CoMan),
            obs("b", false, 4.0, 10.0, Gender::Woman, CoGender::CoNeutral),
            obs("c", true, 2.0, 5.0, Gender::Woman, CoGender::CoWoman),
            obs("d", false, 0.0, 3.0, Gender::Man, CoGender::CoMan),
            obs("e", false, 2.0, 3.0, Gender::Man, CoGender::Unassigned),
        ]
    }

    #[test]
    fn encoding_endpoints_and_dummies() {
        let d = encode(&small_sample(), ModelId::M3).unwrap();
        assert_eq!(d.columns, ["intercept", "exhibitions_per_year", "career_length", "woman", "co_neutral", "co_woman"]);
        assert_eq!(d.n(), 3);
        assert_eq!(d.excluded.len(), 2);
        assert_eq!(d.x.row(0).iter().copied().collect::<Vec<_>>(), [1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(d.x.row(1).iter().copied().collect::<Vec<_>>(), [1.0, 1.0, 1.0, 1.0, 1.0, 0.0]);
        assert_eq!(d.x.row(2)[3], 1.0);
        assert_eq!(d.x.row(2)[5], 1.0);
    }

    #[test]
    fn interaction_baseline_is_all_zero() {
        let d = encode(&small_sample(), ModelId::M4).unwrap();
        assert_eq!(d.columns.len(), 8);
        assert!(d.x.row(0).iter().skip(3).all(|&v| v == 0.0));
        assert_eq!(d.x[(1, d.columns.iter().position(|c| c == "woman:co_neutral").unwrap())], 1.0);
    }

    #[test]
    fn constant_feature_is_dropped() {
        let s = vec![
            obs("a", true, 1.0, 2.0, Gender::Man, CoGender::CoMan),
            obs("b", false, 3.0, 2.0, Gender::Man, CoGender::CoMan),
        ];
        let d = encode(&s, ModelId::M1).unwrap();
        assert_eq!(d.columns, ["intercept", "exhibitions_per_year"]);
        assert_eq!(d.warnings.len(), 1);
    }

    fn intercept_only(ones: usize, zeros: usize) -> Design {
        let n = ones + zeros;
        let y = DVector::from_iterator(n, (0..n).map(|i| if i < ones { 1.0 } else { 0.0 }));
        Design::from_matrix(vec!["intercept".into()], DMatrix::from_element(n, 1, 1.0), y).unwrap()
    }

    #[test]
    fn balanced_intercept_is_zero() {
        let f = fit(&intercept_only(50, 50), &FitConfig::default()).unwrap();
        assert!(f.coefficients[0].coef.abs() < 1e-12);
        let f = fit(&intercept_only(30, 70), &FitConfig::default()).unwrap();
        assert!((f.coefficients[0].coef - (30.0f64 / 70.0).ln()).abs() < 1e-10);
    }

    #[test]
    fn all_zero_outcomes_are_separated() {
        for n in [5, 100, 10_000] {
            let err = fit(&intercept_only(0, n), &FitConfig::default()).unwrap_err();
            assert!(matches!(err, RegressError::Separation { .. }), "{err:?}");
        }
    }

    #[test]
    fn duplicated_column_is_named() {
        let x = DMatrix::from_row_slice(4, 3, &[1.0, 0.0, 0.0, 1.0, 1.0, 2.0, 1.0, 0.5, 1.0, 1.0, 0.2, 0.4]);
        let y = DVector::from_vec(vec![1.0, 0.0, 1.0, 0.0]);
        let d = Design::from_matrix(vec!["intercept".into(), "u".into(), "v".into()], x, y).unwrap();
        match fit(&d, &FitConfig::default()) {
            Err(RegressError::RankDeficient { column, with }) => {
                assert_eq!(column, "v");
                assert_eq!(with, vec!["intercept".to_string(), "u".to_string()]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn wald_interval_matches_published_width() {
        let c = Coefficient::new("woman", -0.456, Some(0.036));
        // published inputs and endpoints are rounded to three decimals
        assert!((c.ci_low.unwrap() - -0.526).abs() < 1e-3);
        assert!((c.ci_high.unwrap() - -0.385).abs() < 1e-3);
        assert_eq!(c.odds_ratio, (-0.456f64).exp());
        assert!((c.odds_ratio - 0.634).abs() < 5e-4);
    }

    #[test]
    fn sigmoid_of_intercept() {
        let f = RegressionFit::from_coefficients(Some(ModelId::M2), &[("intercept", -4.265)], vec![]);
        let p = predict(&f, &obs("x", false, 1.0, 1.0, Gender::Man, CoGender::CoMan)).probability;
        assert!((p - 0.0139).abs() < 1e-4);
        let f = RegressionFit::from_coefficients(None, &[("intercept", 0.0)], vec![]);
        assert_eq!(predict(&f, &obs("x", false, 1.0, 1.0, Gender::Man, CoGender::CoMan)).probability, 0.5);
    }

    #[test]
    fn extrapolation_is_flagged() {
        let t = vec![Transform { feature: "career_length".into(), ln_min: 0.0, ln_max: 3.0 }];
        let f = RegressionFit::from_coefficients(None, &[("intercept", 0.0), ("career_length", 1.0)], t);
        assert!(!predict(&f, &obs("x", false, 1.0, 5.0, Gender::Man, CoGender::CoMan)).extrapolated);
        assert!(predict(&f, &obs("x", false, 1.0, 50.0, Gender::Man, CoGender::CoMan)).extrapolated);
    }

    #[test]
    fn compare_rejects_mismatched_samples() {
        let a = fit(&intercept_only(3, 7), &FitConfig::default()).unwrap();
        let b = fit(&intercept_only(3, 8), &FitConfig::default()).unwrap();
        assert!(matches!(compare(&[&a, &b]), Err(RegressError::MismatchedSamples(_))));
        let rows = compare(&[&a, &a]).unwrap();
        assert_eq!(rows[1].delta_bic, 0.0);
    }

    #[test]
    fn bic_identity() {
        let f = fit(&intercept_only(13, 29), &FitConfig::default()).unwrap();
        assert_eq!(f.bic, 1.0 * (42f64).ln() - 2.0 * f.log_likelihood);
    }
}
