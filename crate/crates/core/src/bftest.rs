//! Bayes-factor binomial tests and the two-stage institution classifier.
//!
//! A unit (institution or country) with `k` exhibitions by women out of `n`
//! is first tested against the point null `p = p0` with a two-sided
//! alternative. Strong evidence for the null makes it `NullConsistent`;
//! strong evidence against it triggers a one-sided test in the direction of
//! the observed deviation, whose verdict decides between `ManOver` and
//! `WomanOver`. Everything in between is `Uncategorised`.
//!
//! All Bayes factors are carried as natural logarithms: for country-sized
//! tallies they exceed the range of `f64`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{CleanCorpus, Gender};
use crate::special::{ln_beta, ln_beta_reg};

#[derive(Debug, Error, PartialEq)]
pub enum BfError {
    #[error("insufficient data: no exhibitions")]
    InsufficientData,
    #[error("invalid test input: {0}")]
    InvalidInput(String),
    #[error("incomplete beta evaluation failed for a={a}, b={b}, x={x}")]
    Numerical { a: f64, b: f64, x: f64 },
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

/// Beta(a, b) prior on the women-exhibition probability under the alternative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BetaPrior {
    pub a: f64,
    pub b: f64,
}

impl Default for BetaPrior {
    fn default() -> Self {
        Self { a: 1.0, b: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Below,
    Above,
}

fn check_inputs(n: u64, k: u64, p0: f64, prior: BetaPrior) -> Result<(), BfError> {
    if n == 0 {
        return Err(BfError::InsufficientData);
    }
    if k > n {
        return Err(BfError::InvalidInput(format!("k={k} exceeds n={n}")));
    }
    if !(p0 > 0.0 && p0 < 1.0) {
        return Err(BfError::InvalidInput(format!("p0={p0} outside (0, 1)")));
    }
    if !(prior.a > 0.0 && prior.b > 0.0) {
        return Err(BfError::InvalidInput(format!("prior Beta({}, {}) not proper", prior.a, prior.b)));
    }
    Ok(())
}

/// `ln BF₁₀` for `H1: p ~ Beta(a, b)` against `H0: p = p0`.
///
/// The binomial coefficient cancels, leaving
/// `ln B(k+a, n−k+b) − ln B(a, b) − k ln p0 − (n−k) ln(1−p0)`.
pub fn log_bf_two_sided(n: u64, k: u64, p0: f64, prior: BetaPrior) -> Result<f64, BfError> {
    check_inputs(n, k, p0, prior)?;
    let (kf, mf) = (k as f64, (n - k) as f64);
    let ln_null = kf * p0.ln() + mf * ln_complement(p0);
    Ok(ln_beta(kf + prior.a, mf + prior.b) - ln_beta(prior.a, prior.b) - ln_null)
}

// 1 - p is exact for p >= 0.5, which keeps (n, k) / (n, n-k) symmetric at p0 = 0.5.
fn ln_complement(p: f64) -> f64 {
    if p >= 0.5 {
        (1.0 - p).ln()
    } else {
        (-p).ln_1p()
    }
}

/// `ln BF₁₀` for a directional alternative whose prior is `Beta(a, b)`
/// truncated to `[0, p0)` (`Below`) or `(p0, 1]` (`Above`) and renormalized.
pub fn log_bf_one_sided(n: u64, k: u64, p0: f64, direction: Direction, prior: BetaPrior) -> Result<f64, BfError> {
    let two_sided = log_bf_two_sided(n, k, p0, prior)?;
    let (kf, mf) = (k as f64, (n - k) as f64);
    let (post_a, post_b) = (kf + prior.a, mf + prior.b);
    let ln_reg = |a: f64, b: f64, x: f64| ln_beta_reg(a, b, x).ok_or(BfError::Numerical { a, b, x });
    let (posterior_mass, prior_mass) = match direction {
        Direction::Below => (ln_reg(post_a, post_b, p0)?, ln_reg(prior.a, prior.b, p0)?),
        Direction::Above => (ln_reg(post_b, post_a, 1.0 - p0)?, ln_reg(prior.b, prior.a, 1.0 - p0)?),
    };
    Ok(two_sided + posterior_mass - prior_mass)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriterionKind {
    GenderNeutral,
    GenderBalanced,
}

impl CriterionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::GenderNeutral => "gender_neutral",
            Self::GenderBalanced => "gender_balanced",
        }
    }

    /// Short tag used in artifact file names.
    pub fn tag(self) -> &'static str {
        match self {
            Self::GenderNeutral => "neutral",
            Self::GenderBalanced => "balanced",
        }
    }
}

/// Null hypothesis for the women-exhibition share.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquityCriterion {
    pub kind: CriterionKind,
    pub p0: f64,
}

impl EquityCriterion {
    pub fn balanced() -> Self {
        Self { kind: CriterionKind::GenderBalanced, p0: 0.5 }
    }

    /// Gender-neutral null at the corpus women fraction.
    pub fn neutral(corpus: &CleanCorpus) -> Result<Self, BfError> {
        Self::neutral_at(corpus.women_fraction)
    }

    pub fn neutral_at(women_fraction: f64) -> Result<Self, BfError> {
        if !(women_fraction > 0.0 && women_fraction < 1.0) {
            return Err(BfError::InvalidInput(format!(
                "women fraction {women_fraction} cannot serve as a null proportion"
            )));
        }
        Ok(Self { kind: CriterionKind::GenderNeutral, p0: women_fraction })
    }

    pub fn for_kind(kind: CriterionKind, corpus: &CleanCorpus) -> Result<Self, BfError> {
        match kind {
            CriterionKind::GenderBalanced => Ok(Self::balanced()),
            CriterionKind::GenderNeutral => Self::neutral(corpus),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExhibitionTally {
    pub unit_id: String,
    pub n: u64,
    pub k: u64,
}

impl ExhibitionTally {
    pub fn p_hat(&self) -> Option<f64> {
        (self.n > 0).then(|| self.k as f64 / self.n as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    ManOver,
    WomanOver,
    NullConsistent,
    Uncategorised,
}

impl Category {
    pub const ALL: [Category; 4] =
        [Category::ManOver, Category::WomanOver, Category::NullConsistent, Category::Uncategorised];
    pub const CATEGORISABLE: [Category; 3] = [Category::ManOver, Category::WomanOver, Category::NullConsistent];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::ManOver => "man_over",
            Self::WomanOver => "woman_over",
            Self::NullConsistent => "null_consistent",
            Self::Uncategorised => "uncategorised",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.as_str() == s)
    }

    pub fn is_categorised(self) -> bool {
        self != Self::Uncategorised
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifierConfig {
    pub prior: BetaPrior,
    pub evidence_threshold: f64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        Self { prior: BetaPrior::default(), evidence_threshold: 3.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationResult {
    pub unit_id: String,
    pub criterion: CriterionKind,
    pub p0: f64,
    pub n: u64,
    pub k: u64,
    /// ln BF₁₀ of the two-sided test; absent when `n = 0`.
    pub ln_bf_two_sided: Option<f64>,
    /// ln BF₁₀ of the directional follow-up, when it was run.
    pub ln_bf_one_sided: Option<f64>,
    pub category: Category,
    pub reason: Option<String>,
}

impl ClassificationResult {
    pub fn p_hat(&self) -> Option<f64> {
        (self.n > 0).then(|| self.k as f64 / self.n as f64)
    }
}

/// Two-stage classification of a single tally.
pub fn classify(
    tally: &ExhibitionTally,
    criterion: &EquityCriterion,
    config: &ClassifierConfig,
) -> Result<ClassificationResult, BfError> {
    let threshold = config.evidence_threshold;
    if !(threshold > 1.0) {
        return Err(BfError::InvalidInput(format!("evidence threshold {threshold} must exceed 1")));
    }
    let mut result = ClassificationResult {
        unit_id: tally.unit_id.clone(),
        criterion: criterion.kind,
        p0: criterion.p0,
        n: tally.n,
        k: tally.k,
        ln_bf_two_sided: None,
        ln_bf_one_sided: None,
        category: Category::Uncategorised,
        reason: None,
    };
    if tally.n == 0 {
        result.reason = Some("no exhibitions".into());
        return Ok(result);
    }
    let ln_threshold = threshold.ln();
    let two = log_bf_two_sided(tally.n, tally.k, criterion.p0, config.prior)?;
    result.ln_bf_two_sided = Some(two);
    if two < -ln_threshold {
        result.category = Category::NullConsistent;
        return Ok(result);
    }
    if two <= ln_threshold {
        result.reason = Some("anecdotal evidence".into());
        return Ok(result);
    }

    let p_hat = tally.k as f64 / tally.n as f64;
    let (direction, category) = if p_hat < criterion.p0 {
        (Direction::Below, Category::ManOver)
    } else if p_hat > criterion.p0 {
        (Direction::Above, Category::WomanOver)
    } else {
        return Err(BfError::Internal(format!(
            "unit {} has p_hat equal to p0 yet two-sided ln BF {two} above threshold",
            tally.unit_id
        )));
    };
    let one = log_bf_one_sided(tally.n, tally.k, criterion.p0, direction, config.prior)?;
    result.ln_bf_one_sided = Some(one);
    if one > ln_threshold {
        result.category = category;
    } else {
        result.reason = Some("directional evidence below threshold".into());
    }
    Ok(result)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupBy {
    Institution,
    Country,
}

impl GroupBy {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Institution => "institution",
            Self::Country => "country",
        }
    }
}

/// Per-unit tallies of all and women exhibitions, keyed by unit id.
pub fn tallies(corpus: &CleanCorpus, group_by: GroupBy) -> Vec<ExhibitionTally> {
    let gender = corpus.gender_of();
    let mut counts: BTreeMap<&str, (u64, u64)> = BTreeMap::new();
    for e in &corpus.exhibitions {
        let unit = match group_by {
            GroupBy::Institution => e.institution_id.as_str(),
            GroupBy::Country => e.country.as_str(),
        };
        let entry = counts.entry(unit).or_default();
        entry.0 += 1;
        if gender.get(e.artist_id.as_str()) == Some(&Gender::Woman) {
            entry.1 += 1;
        }
    }
    counts
        .into_iter()
        .map(|(unit, (n, k))| ExhibitionTally { unit_id: unit.to_string(), n, k })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationSummary {
    pub criterion: CriterionKind,
    pub p0: f64,
    pub group_by: GroupBy,
    pub units: usize,
    pub counts: BTreeMap<Category, usize>,
    /// Shares among units that received a category other than uncategorised.
    pub categorised_shares: BTreeMap<Category, f64>,
    /// Fraction of all exhibitions held by uncategorised units.
    pub uncategorised_exhibition_share: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusClassification {
    pub results: Vec<ClassificationResult>,
    pub summary: ClassificationSummary,
}

impl CorpusClassification {
    pub fn category_map(&self) -> BTreeMap<String, Category> {
        self.results.iter().map(|r| (r.unit_id.clone(), r.category)).collect()
    }
}

/// Classifies every unit of the corpus; results are sorted by unit id.
pub fn classify_corpus(
    corpus: &CleanCorpus,
    criterion: &EquityCriterion,
    group_by: GroupBy,
    config: &ClassifierConfig,
) -> Result<CorpusClassification, BfError> {
    classify_tallies(&tallies(corpus, group_by), criterion, group_by, config)
}

pub fn classify_tallies(
    tallies: &[ExhibitionTally],
    criterion: &EquityCriterion,
    group_by: GroupBy,
    config: &ClassifierConfig,
) -> Result<CorpusClassification, BfError> {
    let mut results = tallies.iter().map(|t| classify(t, criterion, config)).collect::<Result<Vec<_>, _>>()?;
    results.sort_by(|a, b| a.unit_id.cmp(&b.unit_id));

    for r in &results {
        let p_hat = r.p_hat();
        let consistent = match r.category {
            Category::ManOver => p_hat.is_some_and(|p| p < r.p0),
            Category::WomanOver => p_hat.is_some_and(|p| p > r.p0),
            _ => true,
        };
        if !consistent {
            return Err(BfError::Internal(format!("unit {} category contradicts p_hat", r.unit_id)));
        }
    }

    let mut counts: BTreeMap<Category, usize> = Category::ALL.iter().map(|&c| (c, 0)).collect();
    let mut total_exhibitions = 0u64;
    let mut uncategorised_exhibitions = 0u64;
    for r in &results {
        *counts.get_mut(&r.category).expect("all categories present") += 1;
        total_exhibitions += r.n;
        if r.category == Category::Uncategorised {
            uncategorised_exhibitions += r.n;
        }
    }
    let categorised: usize = Category::CATEGORISABLE.iter().map(|c| counts[c]).sum();
    let categorised_shares = Category::CATEGORISABLE
        .iter()
        .map(|&c| (c, if categorised == 0 { 0.0 } else { counts[&c] as f64 / categorised as f64 }))
        .collect();
    let summary = ClassificationSummary {
        criterion: criterion.kind,
        p0: criterion.p0,
        group_by,
        units: results.len(),
        counts,
        categorised_shares,
        uncategorised_exhibition_share: if total_exhibitions == 0 {
            0.0
        } else {
            uncategorised_exhibitions as f64 / total_exhibitions as f64
        },
    };
    Ok(CorpusClassification { results, summary })
}

pub const CLASSIFICATION_HEADER: [&str; 8] =
    ["unit_id", "criterion", "n", "k", "p_hat", "bf_two_sided", "bf_one_sided", "category"];

fn log10_field(ln_bf: Option<f64>) -> String {
    ln_bf.map(|v| (v / std::f64::consts::LN_10).to_string()).unwrap_or_default()
}

/// CSV rows with Bayes factors serialized as log10.
pub fn classification_rows(results: &[ClassificationResult]) -> Vec<[String; 8]> {
    results
        .iter()
        .map(|r| {
            [
                r.unit_id.clone(),
                r.criterion.as_str().to_string(),
                r.n.to_string(),
                r.k.to_string(),
                r.p_hat().map(|p| p.to_string()).unwrap_or_default(),
                log10_field(r.ln_bf_two_sided),
                log10_field(r.ln_bf_one_sided),
                r.category.as_str().to_string(),
            ]
        })
        .collect()
}

/// Parses rows written from [`classification_rows`] back into unit categories.
pub fn parse_category_rows<R: std::io::Read>(reader: R) -> Result<BTreeMap<String, Category>, String> {
    let mut rdr = csv::Reader::from_reader(reader);
    let header: Vec<String> = rdr.headers().map_err(|e| e.to_string())?.iter().map(str::to_string).collect();
    if header != CLASSIFICATION_HEADER {
        return Err(format!("unexpected classification header {}", header.join(",")));
    }
    let mut out = BTreeMap::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| e.to_string())?;
        let cat = Category::parse(&rec[7]).ok_or_else(|| format!("bad category `{}`", &rec[7]))?;
        out.insert(rec[0].to_string(), cat);
    }
    Ok(out)
}

/// Edge of a category region in the (n, k) plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryEdge {
    /// Largest k classified man_over.
    ManOverUpper,
    /// Smallest k classified null_consistent.
    NullLower,
    /// Largest k classified null_consistent.
    NullUpper,
    /// Smallest k classified woman_over.
    WomanOverLower,
}

impl BoundaryEdge {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::ManOverUpper => "man_over_upper",
            Self::NullLower => "null_lower",
            Self::NullUpper => "null_upper",
            Self::WomanOverLower => "woman_over_lower",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub criterion: CriterionKind,
    pub n: u64,
    pub edge: BoundaryEdge,
    pub k: u64,
}

/// Decision boundaries for each `n` in `ns`, found by scanning every `k`.
pub fn decision_boundaries(
    criterion: &EquityCriterion,
    ns: &[u64],
    config: &ClassifierConfig,
) -> Result<Vec<BoundaryPoint>, BfError> {
    let mut out = Vec::new();
    for &n in ns {
        if n == 0 {
            continue;
        }
        let mut man_upper = None;
        let mut null_range: Option<(u64, u64)> = None;
        let mut woman_lower = None;
        for k in 0..=n {
            let tally = ExhibitionTally { unit_id: String::new(), n, k };
            match classify(&tally, criterion, config)?.category {
                Category::ManOver => man_upper = Some(k),
                Category::NullConsistent => {
                    null_range = Some(null_range.map_or((k, k), |(lo, _)| (lo, k)));
                }
                Category::WomanOver => {
                    if woman_lower.is_none() {
                        woman_lower = Some(k);
                    }
                }
                Category::Uncategorised => {}
            }
        }
        let mut push = |edge, k: Option<u64>| {
            if let Some(k) = k {
                out.push(BoundaryPoint { criterion: criterion.kind, n, edge, k });
            }
        };
        push(BoundaryEdge::ManOverUpper, man_upper);
        push(BoundaryEdge::NullLower, null_range.map(|r| r.0));
        push(BoundaryEdge::NullUpper, null_range.map(|r| r.1));
        push(BoundaryEdge::WomanOverLower, woman_lower);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const UNIFORM: BetaPrior = BetaPrior { a: 1.0, b: 1.0 };

    fn tally(n: u64, k: u64) -> ExhibitionTally {
        ExhibitionTally { unit_id: "u".into(), n, k }
    }

    #[test]
    fn two_sided_closed_form_examples() {
        // (1/11) / (C(10,5) 0.5^10)
        let want = (1.0 / 11.0) / (252.0 * 0.5f64.powi(10));
        let got = log_bf_two_sided(10, 5, 0.5, UNIFORM).unwrap().exp();
        assert!((got / want - 1.0).abs() < 1e-12);
        assert!((got - 0.3694).abs() < 1e-4);
        let got = log_bf_two_sided(100, 50, 0.5, UNIFORM).unwrap().exp();
        assert!((got - 0.1244).abs() < 1e-4);
    }

    #[test]
    fn n_zero_is_insufficient() {
        assert_eq!(log_bf_two_sided(0, 0, 0.5, UNIFORM), Err(BfError::InsufficientData));
        assert_eq!(log_bf_one_sided(0, 0, 0.5, Direction::Below, UNIFORM), Err(BfError::InsufficientData));
    }

    #[test]
    fn extreme_p0_stays_finite() {
        for &p0 in &[1e-9, 0.999_999_999] {
            let v = log_bf_two_sided(50, 50, p0, UNIFORM).unwrap();
            assert!(v.is_finite());
            let v = log_bf_one_sided(50, 50, p0, Direction::Above, UNIFORM).unwrap();
            assert!(v.is_finite());
        }
    }

    #[test]
    fn one_sided_strong_deviation() {
        let two = log_bf_two_sided(100, 10, 0.5, UNIFORM).unwrap();
        let below = log_bf_one_sided(100, 10, 0.5, Direction::Below, UNIFORM).unwrap();
        assert!((below - two - 2f64.ln()).abs() < 1e-9);
        let rel = below.exp() / 1.45e15 - 1.0;
        assert!(rel.abs() < 0.01, "{}", below.exp());
    }

    #[test]
    fn one_sided_symmetry_and_centered_data() {
        let b = log_bf_one_sided(10, 5, 0.5, Direction::Below, UNIFORM).unwrap();
        let a = log_bf_one_sided(10, 5, 0.5, Direction::Above, UNIFORM).unwrap();
        assert!((a - b).abs() < 1e-12);
        assert!(log_bf_one_sided(50, 25, 0.5, Direction::Below, UNIFORM).unwrap() < 0.0);
    }

    #[test]
    fn decision_fixtures() {
        let c = EquityCriterion::balanced();
        let cfg = ClassifierConfig::default();
        assert_eq!(classify(&tally(10, 5), &c, &cfg).unwrap().category, Category::Uncategorised);
        assert_eq!(classify(&tally(100, 50), &c, &cfg).unwrap().category, Category::NullConsistent);
        let r = classify(&tally(100, 10), &c, &cfg).unwrap();
        assert_eq!(r.category, Category::ManOver);
        assert!(r.ln_bf_one_sided.unwrap() > 3f64.ln());
        assert_eq!(classify(&tally(100, 90), &c, &cfg).unwrap().category, Category::WomanOver);
    }

    #[test]
    fn empty_unit_is_uncategorised() {
        let r = classify(&tally(0, 0), &EquityCriterion::balanced(), &ClassifierConfig::default()).unwrap();
        assert_eq!(r.category, Category::Uncategorised);
        assert_eq!(r.reason.as_deref(), Some("no exhibitions"));
        assert!(r.ln_bf_two_sided.is_none());
    }

    #[test]
    fn threshold_must_exceed_one() {
        let cfg = ClassifierConfig { evidence_threshold: 1.0, ..Default::default() };
        assert!(classify(&tally(10, 5), &EquityCriterion::balanced(), &cfg).is_err());
    }

    #[test]
    fn single_empty_institution_summary() {
        let out = classify_tallies(&[tally(0, 0)], &EquityCriterion::balanced(), GroupBy::Institution, &Default::default())
            .unwrap();
        assert_eq!(out.results.len(), 1);
        assert_eq!(out.summary.counts[&Category::Uncategorised], 1);
        assert_eq!(out.summary.uncategorised_exhibition_share, 0.0);
    }

    #[test]
    fn consistency_in_n() {
        let mut last = f64::NEG_INFINITY;
        for n in [100u64, 1000, 10_000] {
            let v = log_bf_two_sided(n, (n as f64 * 0.4) as u64, 0.5, UNIFORM).unwrap();
            assert!(v > last);
            last = v;
        }
        assert!(last > 100.0);
    }

    #[test]
    fn large_n_is_stable() {
        let v = log_bf_two_sided(1_000_000, 400_000, 0.5, UNIFORM).unwrap();
        assert!(v.is_finite() && v > 1e4);
        let v = log_bf_one_sided(1_000_000, 499_800, 0.5, Direction::Below, UNIFORM).unwrap();
        assert!(v.is_finite());
    }

    #[test]
    fn boundaries_bracket_the_null() {
        let c = EquityCriterion::balanced();
        let pts = decision_boundaries(&c, &[100], &ClassifierConfig::default()).unwrap();
        let get = |e| pts.iter().find(|p| p.edge == e).unwrap().k;
        assert!(get(BoundaryEdge::ManOverUpper) < get(BoundaryEdge::NullLower));
        assert!(get(BoundaryEdge::NullLower) <= 50 && 50 <= get(BoundaryEdge::NullUpper));
        assert!(get(BoundaryEdge::NullUpper) < get(BoundaryEdge::WomanOverLower));
        // symmetric around 50 under the balanced null
        assert_eq!(get(BoundaryEdge::NullLower) + get(BoundaryEdge::NullUpper), 100);
    }

    proptest! {
        #[test]
        fn balanced_symmetry(n in 1u64..2000, frac in 0.0f64..=1.0) {
            let k = ((n as f64) * frac).round() as u64;
            let a = log_bf_two_sided(n, k, 0.5, UNIFORM).unwrap();
            let b = log_bf_two_sided(n, n - k, 0.5, UNIFORM).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn below_bf_non_increasing_in_k(n in 2u64..400) {
            let mut prev = f64::INFINITY;
            for k in 0..=n / 2 {
                let v = log_bf_one_sided(n, k, 0.5, Direction::Below, UNIFORM).unwrap();
                prop_assert!(v <= prev + 1e-9 * prev.abs().max(1.0), "n={} k={} {} > {}", n, k, v, prev);
                prev = v;
            }
        }

        #[test]
        fn directional_categories_agree_with_p_hat(n in 1u64..3000, frac in 0.0f64..=1.0, p0 in 0.05f64..0.95) {
            let k = ((n as f64) * frac).round() as u64;
            let crit = EquityCriterion { kind: CriterionKind::GenderNeutral, p0 };
            let r = classify(&tally(n, k), &crit, &ClassifierConfig::default()).unwrap();
            let p_hat = k as f64 / n as f64;
            match r.category {
                Category::ManOver => prop_assert!(p_hat < p0 && r.ln_bf_two_sided.unwrap() > 3f64.ln()),
                Category::WomanOver => prop_assert!(p_hat > p0 && r.ln_bf_one_sided.unwrap() > 3f64.ln()),
                Category::NullConsistent => prop_assert!(r.ln_bf_two_sided.unwrap() < -(3f64.ln())),
                Category::Uncategorised => {}
            }
        }
    }
}
