//! Artist-level career features, co-exhibition gender and early/late
//! lock-in of that label.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bftest::{Category, CriterionKind};
use crate::corpus::{CleanCorpus, ExhibitionEvent, Gender};
use crate::exnet::{percentile_bins, PrestigeBin, PrestigeTable};

use chrono::Datelike;

#[derive(Debug, Error)]
pub enum CareerError {
    #[error("institution `{0}` has no classification")]
    MissingClassification(String),
    #[error("{file}: {source}")]
    Csv { file: String, source: csv::Error },
    #[error("{file} row {row}: {reason}")]
    Row { file: String, row: usize, reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CareerFeatures {
    pub artist_id: String,
    pub gender: Gender,
    pub exhibitions: usize,
    pub career_length: u32,
    pub exhibitions_per_year: f64,
    /// Absent when none of the artist's venues has a prestige score.
    pub artist_prestige: Option<f64>,
    pub prestige_bin: Option<PrestigeBin>,
}

/// Career length, activity and mean venue prestige for every artist with exhibitions.
pub fn career_features(corpus: &CleanCorpus, prestige: &PrestigeTable) -> Vec<CareerFeatures> {
    let scores = prestige.score_map();
    let genders = corpus.gender_of();
    let mut out: Vec<CareerFeatures> = corpus
        .exhibitions_by_artist()
        .into_iter()
        .map(|(artist_id, events)| {
            let first = events.iter().map(|e| e.date.year()).min().expect("non-empty");
            let last = events.iter().map(|e| e.date.year()).max().expect("non-empty");
            let career_length = (last - first + 1) as u32;
            let scored: Vec<f64> =
                events.iter().filter_map(|e| scores.get(e.institution_id.as_str()).copied()).collect();
            let artist_prestige =
                (!scored.is_empty()).then(|| scored.iter().sum::<f64>() / scored.len() as f64);
            CareerFeatures {
                artist_id: artist_id.to_string(),
                gender: genders[artist_id],
                exhibitions: events.len(),
                career_length,
                exhibitions_per_year: events.len() as f64 / career_length as f64,
                artist_prestige,
                prestige_bin: None,
            }
        })
        .collect();

    let with_prestige: Vec<usize> = (0..out.len()).filter(|&i| out[i].artist_prestige.is_some()).collect();
    let values: Vec<f64> = with_prestige.iter().map(|&i| out[i].artist_prestige.unwrap()).collect();
    for (i, bin) in with_prestige.into_iter().zip(percentile_bins(&values)) {
        out[i].prestige_bin = Some(bin);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoGender {
    CoMan,
    CoNeutral,
    CoWoman,
    Unassigned,
}

impl CoGender {
    /// Assigned labels in matrix order.
    pub const ASSIGNED: [CoGender; 3] = [CoGender::CoMan, CoGender::CoNeutral, CoGender::CoWoman];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::CoMan => "co_man",
            Self::CoNeutral => "co_neutral",
            Self::CoWoman => "co_woman",
            Self::Unassigned => "unassigned",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [Self::CoMan, Self::CoNeutral, Self::CoWoman, Self::Unassigned].into_iter().find(|c| c.as_str() == s)
    }

    pub fn from_category(c: Category) -> Option<Self> {
        match c {
            Category::ManOver => Some(Self::CoMan),
            Category::WomanOver => Some(Self::CoWoman),
            Category::NullConsistent => Some(Self::CoNeutral),
            Category::Uncategorised => None,
        }
    }

    fn index(self) -> Option<usize> {
        Self::ASSIGNED.iter().position(|&c| c == self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineKind {
    /// Category shares of all exhibition slots at categorisable venues.
    ExhibitionWeighted,
    /// Category shares of categorisable institutions.
    InstitutionWeighted,
}

/// Expected share of each categorisable venue category under random venue choice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryBaseline {
    pub kind: BaselineKind,
    pub shares: BTreeMap<Category, f64>,
}

pub fn category_baseline(
    corpus: &CleanCorpus,
    labels: &BTreeMap<String, Category>,
    kind: BaselineKind,
) -> Result<CategoryBaseline, CareerError> {
    let mut counts: BTreeMap<Category, u64> = Category::CATEGORISABLE.iter().map(|&c| (c, 0)).collect();
    match kind {
        BaselineKind::ExhibitionWeighted => {
            for e in &corpus.exhibitions {
                let c = label_of(labels, &e.institution_id)?;
                if let Some(n) = counts.get_mut(&c) {
                    *n += 1;
                }
            }
        }
        BaselineKind::InstitutionWeighted => {
            for id in crate::corpus::institution_ids(corpus) {
                let c = label_of(labels, id)?;
                if let Some(n) = counts.get_mut(&c) {
                    *n += 1;
                }
            }
        }
    }
    let total: u64 = counts.values().sum();
    let shares = counts
        .into_iter()
        .map(|(c, n)| (c, if total == 0 { 0.0 } else { n as f64 / total as f64 }))
        .collect();
    Ok(CategoryBaseline { kind, shares })
}

fn label_of(labels: &BTreeMap<String, Category>, id: &str) -> Result<Category, CareerError> {
    labels.get(id).copied().ok_or_else(|| CareerError::MissingClassification(id.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoExhibitionProfile {
    pub artist_id: String,
    pub exhibitions: usize,
    pub categorised_exhibitions: usize,
    /// Share of categorised exhibitions per categorisable category.
    pub rho: BTreeMap<Category, f64>,
    pub rho_baseline: BTreeMap<Category, f64>,
    /// `(ρ − ρʳ)/ρʳ`; categories with zero baseline are left out.
    pub relative_difference: BTreeMap<Category, f64>,
    pub co_gender: CoGender,
    pub reasons: Vec<String>,
}

/// Relative differences closer than this count as a tie.
pub const ARGMAX_TIE_TOLERANCE: f64 = 1e-12;

/// Labels an artist by the venue category most overrepresented among their
/// categorised exhibitions relative to the baseline. Ties go to `co_neutral`.
///
/// Artists with `min_exhibitions` exhibitions or fewer stay unassigned.
pub fn co_exhibition_gender(
    artist_id: &str,
    institutions: &[&str],
    labels: &BTreeMap<String, Category>,
    baseline: &CategoryBaseline,
    min_exhibitions: usize,
) -> Result<CoExhibitionProfile, CareerError> {
    let mut counts: BTreeMap<Category, usize> = Category::CATEGORISABLE.iter().map(|&c| (c, 0)).collect();
    for id in institutions {
        if let Some(n) = counts.get_mut(&label_of(labels, id)?) {
            *n += 1;
        }
    }
    let categorised: usize = counts.values().sum();
    let mut profile = CoExhibitionProfile {
        artist_id: artist_id.to_string(),
        exhibitions: institutions.len(),
        categorised_exhibitions: categorised,
        rho: BTreeMap::new(),
        rho_baseline: baseline.shares.clone(),
        relative_difference: BTreeMap::new(),
        co_gender: CoGender::Unassigned,
        reasons: Vec::new(),
    };
    if categorised > 0 {
        profile.rho = counts.iter().map(|(&c, &n)| (c, n as f64 / categorised as f64)).collect();
    }
    for (&c, &expected) in &baseline.shares {
        if expected > 0.0 {
            if let Some(&observed) = profile.rho.get(&c) {
                profile.relative_difference.insert(c, (observed - expected) / expected);
            }
        } else {
            profile.reasons.push(format!("{c} excluded: zero baseline share"));
        }
    }

    if institutions.len() <= min_exhibitions {
        profile.reasons.push(format!("{} exhibitions, need more than {min_exhibitions}", institutions.len()));
        return Ok(profile);
    }
    if categorised == 0 {
        profile.reasons.push("no exhibitions at categorised venues".into());
        return Ok(profile);
    }
    let Some((&best, &top)) = profile.relative_difference.iter().max_by(|a, b| a.1.total_cmp(b.1)) else {
        profile.reasons.push("every category has zero baseline share".into());
        return Ok(profile);
    };
    let tied = profile.relative_difference.iter().filter(|(_, &v)| top - v <= ARGMAX_TIE_TOLERANCE).count() > 1;
    profile.co_gender = if tied {
        profile.reasons.push("tie between categories".into());
        CoGender::CoNeutral
    } else {
        CoGender::from_category(best).expect("categorisable")
    };
    Ok(profile)
}

/// Co-exhibition profiles for every artist with exhibitions.
pub fn co_exhibition_profiles(
    corpus: &CleanCorpus,
    labels: &BTreeMap<String, Category>,
    baseline: &CategoryBaseline,
    min_exhibitions: usize,
) -> Result<Vec<CoExhibitionProfile>, CareerError> {
    corpus
        .exhibitions_by_artist()
        .into_iter()
        .map(|(id, events)| {
            let venues: Vec<&str> = events.iter().map(|e| e.institution_id.as_str()).collect();
            co_exhibition_gender(id, &venues, labels, baseline, min_exhibitions)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionMatrix {
    /// Rows are early labels, columns late labels, both in [`CoGender::ASSIGNED`] order.
    pub counts: [[u64; 3]; 3],
    /// Row-normalized counts; `None` for rows without artists.
    pub probabilities: [Option<[f64; 3]>; 3],
}

impl TransitionMatrix {
    fn from_counts(counts: [[u64; 3]; 3]) -> Self {
        let probabilities = counts.map(|row| {
            let total: u64 = row.iter().sum();
            (total > 0).then(|| row.map(|c| c as f64 / total as f64))
        });
        Self { counts, probabilities }
    }

    pub fn artists(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LockIn {
    pub window: usize,
    pub artists_included: usize,
    /// Long enough careers where one of the windows had no assignable label.
    pub artists_skipped: usize,
    pub global: TransitionMatrix,
    pub by_prestige_bin: BTreeMap<PrestigeBin, TransitionMatrix>,
}

/// Early-versus-late co-exhibition label transitions for artists with at
/// least `2 × window` exhibitions.
pub fn lock_in_matrix(
    corpus: &CleanCorpus,
    labels: &BTreeMap<String, Category>,
    baseline: &CategoryBaseline,
    features: &[CareerFeatures],
    window: usize,
) -> Result<LockIn, CareerError> {
    let bins: HashMap<&str, Option<PrestigeBin>> =
        features.iter().map(|f| (f.artist_id.as_str(), f.prestige_bin)).collect();
    let mut global = [[0u64; 3]; 3];
    let mut per_bin: BTreeMap<PrestigeBin, [[u64; 3]; 3]> = PrestigeBin::ALL.iter().map(|&b| (b, [[0; 3]; 3])).collect();
    let (mut included, mut skipped) = (0, 0);

    let window_label = |id: &str, events: &[&ExhibitionEvent]| -> Result<CoGender, CareerError> {
        let venues: Vec<&str> = events.iter().map(|e| e.institution_id.as_str()).collect();
        Ok(co_exhibition_gender(id, &venues, labels, baseline, 0)?.co_gender)
    };
    for (id, events) in corpus.exhibitions_by_artist() {
        if window == 0 || events.len() < 2 * window {
            continue;
        }
        let early = window_label(id, &events[..window])?;
        let late = window_label(id, &events[events.len() - window..])?;
        let (Some(r), Some(c)) = (early.index(), late.index()) else {
            skipped += 1;
            continue;
        };
        included += 1;
        global[r][c] += 1;
        if let Some(Some(bin)) = bins.get(id) {
            per_bin.get_mut(bin).expect("all bins present")[r][c] += 1;
        }
    }
    Ok(LockIn {
        window,
        artists_included: included,
        artists_skipped: skipped,
        global: TransitionMatrix::from_counts(global),
        by_prestige_bin: per_bin.into_iter().map(|(b, m)| (b, TransitionMatrix::from_counts(m))).collect(),
    })
}

/// One line of `careers.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct CareerRow {
    pub features: CareerFeatures,
    /// Label per criterion that was run.
    pub co_gender: BTreeMap<CriterionKind, CoGender>,
}

pub const CAREERS_HEADER: [&str; 8] = [
    "artist_id",
    "gender",
    "career_length",
    "exhibitions_per_year",
    "artist_prestige",
    "prestige_bin",
    "co_gender_neutral",
    "co_gender_balanced",
];

pub fn write_careers(rows: &[CareerRow], path: &Path) -> Result<(), CareerError> {
    let file = path.display().to_string();
    let err = |source| CareerError::Csv { file: file.clone(), source };
    let mut w = csv::Writer::from_path(path).map_err(err)?;
    w.write_record(CAREERS_HEADER).map_err(err)?;
    for row in rows {
        let f = &row.features;
        let label = |k| row.co_gender.get(&k).map(|c: &CoGender| c.as_str()).unwrap_or("");
        w.write_record([
            f.artist_id.as_str(),
            f.gender.as_str(),
            &f.career_length.to_string(),
            &f.exhibitions_per_year.to_string(),
            &f.artist_prestige.map(|p| p.to_string()).unwrap_or_default(),
            f.prestige_bin.map(PrestigeBin::as_str).unwrap_or(""),
            label(CriterionKind::GenderNeutral),
            label(CriterionKind::GenderBalanced),
        ])
        .map_err(err)?;
    }
    w.flush().map_err(|e| err(e.into()))?;
    Ok(())
}

/// Reads `careers.csv`. The exhibition count is recovered from rate × length.
pub fn read_careers(path: &Path) -> Result<Vec<CareerRow>, CareerError> {
    let file = path.display().to_string();
    let mut rdr = csv::Reader::from_path(path).map_err(|source| CareerError::Csv { file: file.clone(), source })?;
    let header: Vec<String> = rdr
        .headers()
        .map_err(|source| CareerError::Csv { file: file.clone(), source })?
        .iter()
        .map(str::to_string)
        .collect();
    if header != CAREERS_HEADER {
        return Err(CareerError::Row { file, row: 1, reason: format!("unexpected header `{}`", header.join(",")) });
    }
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 2;
        let bad = |reason: &str| CareerError::Row { file: file.clone(), row, reason: reason.to_string() };
        let rec = rec.map_err(|source| CareerError::Csv { file: file.clone(), source })?;
        let gender = Gender::parse(&rec[1]).ok_or_else(|| bad("bad gender"))?;
        let career_length: u32 = rec[2].parse().map_err(|_| bad("bad career_length"))?;
        let exhibitions_per_year: f64 = rec[3].parse().map_err(|_| bad("bad exhibitions_per_year"))?;
        let artist_prestige = match &rec[4] {
            "" => None,
            s => Some(s.parse::<f64>().map_err(|_| bad("bad artist_prestige"))?),
        };
        let prestige_bin = match &rec[5] {
            "" => None,
            s => Some(PrestigeBin::parse(s).ok_or_else(|| bad("bad prestige_bin"))?),
        };
        let mut co_gender = BTreeMap::new();
        for (col, kind) in [(6, CriterionKind::GenderNeutral), (7, CriterionKind::GenderBalanced)] {
            if !rec[col].is_empty() {
                co_gender.insert(kind, CoGender::parse(&rec[col]).ok_or_else(|| bad("bad co-exhibition gender"))?);
            }
        }
        out.push(CareerRow {
            features: CareerFeatures {
                artist_id: rec[0].to_string(),
                gender,
                exhibitions: (exhibitions_per_year * career_length as f64).round() as usize,
                career_length,
                exhibitions_per_year,
                artist_prestige,
                prestige_bin,
            },
            co_gender,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Artist, InstitutionType};
    use crate::exnet::PrestigeEntry;
    use chrono::NaiveDate;
    use proptest::prelude::*;

    fn baseline(man: f64, neutral: f64, woman: f64) -> CategoryBaseline {
        CategoryBaseline {
            kind: BaselineKind::ExhibitionWeighted,
            shares: [(Category::ManOver, man), (Category::NullConsistent, neutral), (Category::WomanOver, woman)].into(),
        }
    }

    fn labels() -> BTreeMap<String, Category> {
        [
            ("M".to_string(), Category::ManOver),
            ("N".to_string(), Category::NullConsistent),
            ("W".to_string(), Category::WomanOver),
            ("U".to_string(), Category::Uncategorised),
        ]
        .into()
    }

    fn venues(m: usize, n: usize, w: usize, u: usize) -> Vec<&'static str> {
        [("M", m), ("N", n), ("W", w), ("U", u)].iter().flat_map(|&(v, k)| std::iter::repeat_n(v, k)).collect()
    }

    #[test]
    fn worked_example_is_co_man() {
        let p = co_exhibition_gender("a", &venues(6, 4, 2, 0), &labels(), &baseline(0.4, 0.4, 0.2), 10).unwrap();
        let rd = &p.relative_difference;
        assert!((rd[&Category::ManOver] - 0.25).abs() < 1e-12);
        assert!((rd[&Category::NullConsistent] + 1.0 / 6.0).abs() < 1e-12);
        assert!((rd[&Category::WomanOver] + 1.0 / 6.0).abs() < 1e-12);
        assert_eq!(p.co_gender, CoGender::CoMan);
    }

    #[test]
    fn only_woman_over_venues() {
        let p = co_exhibition_gender("a", &venues(0, 0, 11, 0), &labels(), &baseline(0.4, 0.4, 0.2), 10).unwrap();
        assert_eq!(p.co_gender, CoGender::CoWoman);
    }

    #[test]
    fn baseline_mirror_is_a_tie() {
        let p = co_exhibition_gender("a", &venues(4, 4, 2, 3), &labels(), &baseline(0.4, 0.4, 0.2), 10).unwrap();
        assert_eq!(p.co_gender, CoGender::CoNeutral);
        assert!(p.reasons.iter().any(|r| r.contains("tie")));
    }

    #[test]
    fn threshold_is_strict() {
        let b = baseline(0.4, 0.4, 0.2);
        assert_eq!(co_exhibition_gender("a", &venues(10, 0, 0, 0), &labels(), &b, 10).unwrap().co_gender, CoGender::Unassigned);
        assert_eq!(co_exhibition_gender("a", &venues(11, 0, 0, 0), &labels(), &b, 10).unwrap().co_gender, CoGender::CoMan);
    }

    #[test]
    fn only_uncategorised_venues_is_unassigned() {
        let p = co_exhibition_gender("a", &venues(0, 0, 0, 20), &labels(), &baseline(0.4, 0.4, 0.2), 10).unwrap();
        assert_eq!(p.co_gender, CoGender::Unassigned);
        assert!(p.rho.is_empty());
    }

    #[test]
    fn zero_baseline_category_is_excluded() {
        let p = co_exhibition_gender("a", &venues(1, 5, 6, 0), &labels(), &baseline(0.5, 0.5, 0.0), 10).unwrap();
        assert!(!p.relative_difference.contains_key(&Category::WomanOver));
        assert_eq!(p.co_gender, CoGender::CoNeutral);
        assert!(p.reasons.iter().any(|r| r.contains("woman_over excluded")));
    }

    #[test]
    fn unknown_venue_is_an_error() {
        let err = co_exhibition_gender("a", &["X"], &labels(), &baseline(0.4, 0.4, 0.2), 0).unwrap_err();
        assert!(matches!(err, CareerError::MissingClassification(id) if id == "X"));
    }

    proptest! {
        #[test]
        fn label_ignores_exhibition_order(counts in prop::array::uniform4(0usize..15), seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let b = baseline(0.35, 0.45, 0.2);
            let mut v = venues(counts[0], counts[1], counts[2], counts[3]);
            let before = co_exhibition_gender("a", &v, &labels(), &b, 3).unwrap().co_gender;
            v.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let after = co_exhibition_gender("a", &v, &labels(), &b, 3).unwrap().co_gender;
            prop_assert_eq!(before, after);
        }

        #[test]
        fn swapping_man_and_woman_swaps_label(m in 0usize..15, n in 0usize..15, w in 0usize..15, bm in 0.05f64..0.9) {
            let bw = (1.0 - bm) * 0.4;
            let bn = 1.0 - bm - bw;
            let l = labels();
            let a = co_exhibition_gender("a", &venues(m, n, w, 0), &l, &baseline(bm, bn, bw), 0).unwrap().co_gender;
            let b = co_exhibition_gender("a", &venues(w, n, m, 0), &l, &baseline(bw, bn, bm), 0).unwrap().co_gender;
            let swap = |c| match c {
                CoGender::CoMan => CoGender::CoWoman,
                CoGender::CoWoman => CoGender::CoMan,
                other => other,
            };
            prop_assert_eq!(swap(a), b);
        }
    }

    fn event(artist: &str, inst: &str, day: u32) -> ExhibitionEvent {
        ExhibitionEvent {
            artist_id: artist.into(),
            institution_id: inst.into(),
            date: NaiveDate::from_ymd_opt(2000, 1, 1).unwrap() + chrono::Days::new(day as u64 * 40),
            institution_type: InstitutionType::Gallery,
            country: "FR".into(),
        }
    }

    fn corpus_of(careers: &[(&str, Vec<&str>)]) -> CleanCorpus {
        let artists = careers
            .iter()
            .map(|(id, _)| Artist { artist_id: id.to_string(), name: id.to_string(), birth_year: None, gender: Gender::Woman })
            .collect();
        let exhibitions = careers
            .iter()
            .flat_map(|(id, vs)| vs.iter().enumerate().map(move |(i, v)| event(id, v, i as u32)))
            .collect();
        CleanCorpus::from_parts(artists, exhibitions, vec![])
    }

    fn flat_prestige(corpus: &CleanCorpus) -> PrestigeTable {
        let entries = crate::corpus::institution_ids(corpus)
            .into_iter()
            .map(|id| PrestigeEntry { institution_id: id.into(), score: 1.0, bin: PrestigeBin::Low })
            .collect();
        PrestigeTable { entries, iterations: 1, residual: 0.0 }
    }

    #[test]
    fn features_from_dates() {
        let c = corpus_of(&[("a", vec!["M"; 10]), ("b", vec!["N"])]);
        let f = career_features(&c, &flat_prestige(&c));
        // 10 shows 40 days apart span 2000..2000+360 days
        assert_eq!(f[0].career_length, 1);
        assert_eq!(f[0].exhibitions_per_year, 10.0);
        assert_eq!((f[1].career_length, f[1].exhibitions_per_year), (1, 1.0));
    }

    #[test]
    fn artist_prestige_is_mean_with_multiplicity() {
        let c = corpus_of(&[("a", vec!["M", "N"]), ("b", vec!["M", "M", "N"])]);
        let table = PrestigeTable {
            entries: vec![
                PrestigeEntry { institution_id: "M".into(), score: 0.2, bin: PrestigeBin::Low },
                PrestigeEntry { institution_id: "N".into(), score: 0.8, bin: PrestigeBin::High },
            ],
            iterations: 1,
            residual: 0.0,
        };
        let f = career_features(&c, &table);
        assert!((f[0].artist_prestige.unwrap() - 0.5).abs() < 1e-15);
        assert!((f[1].artist_prestige.unwrap() - 0.4).abs() < 1e-15);
        let missing = career_features(&c, &PrestigeTable { entries: vec![], iterations: 1, residual: 0.0 });
        assert!(missing.iter().all(|f| f.artist_prestige.is_none() && f.prestige_bin.is_none()));
    }

    #[test]
    fn segregated_careers_lock_in_perfectly() {
        let c = corpus_of(&[
            ("a", vec!["M"; 12]),
            ("b", vec!["N"; 10]),
            ("c", vec!["W"; 11]),
            ("d", vec!["M"; 3]),
        ]);
        let l = labels();
        let b = category_baseline(&c, &l, BaselineKind::ExhibitionWeighted).unwrap();
        let f = career_features(&c, &flat_prestige(&c));
        let lock = lock_in_matrix(&c, &l, &b, &f, 5).unwrap();
        assert_eq!(lock.artists_included, 3);
        for (r, row) in lock.global.probabilities.iter().enumerate() {
            let row = row.unwrap();
            for (c, v) in row.iter().enumerate() {
                assert_eq!(*v, if r == c { 1.0 } else { 0.0 });
            }
        }
        let by_bin: u64 = lock.by_prestige_bin.values().map(TransitionMatrix::artists).sum();
        assert_eq!(by_bin, lock.global.artists());
    }

    #[test]
    fn windows_follow_career_order() {
        let mut career = vec!["M"; 5];
        career.extend(["W"; 5]);
        let c = corpus_of(&[("a", career)]);
        let l = labels();
        let b = baseline(0.4, 0.4, 0.2);
        let lock = lock_in_matrix(&c, &l, &b, &[], 5).unwrap();
        assert_eq!(lock.global.counts[0][2], 1);
        assert_eq!(lock.global.probabilities[1], None);
    }

    #[test]
    fn baselines_by_slot_and_by_venue() {
        let c = corpus_of(&[("a", vec!["M", "M", "M", "N", "U"]), ("b", vec!["W"])]);
        let l = labels();
        let ex = category_baseline(&c, &l, BaselineKind::ExhibitionWeighted).unwrap();
        assert_eq!(ex.shares[&Category::ManOver], 0.6);
        let inst = category_baseline(&c, &l, BaselineKind::InstitutionWeighted).unwrap();
        assert!((inst.shares[&Category::ManOver] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn careers_csv_round_trip() {
        let c = corpus_of(&[("a", vec!["M"; 12]), ("b", vec!["N"; 3])]);
        let f = career_features(&c, &flat_prestige(&c));
        let rows: Vec<CareerRow> = f
            .into_iter()
            .map(|features| CareerRow {
                features,
                co_gender: [(CriterionKind::GenderNeutral, CoGender::CoMan)].into(),
            })
            .collect();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("careers.csv");
        write_careers(&rows, &path).unwrap();
        assert_eq!(read_careers(&path).unwrap(), rows);
    }
}
