//! Seeded synthetic art worlds with planted institution gender shares,
//! venue preferences and auction access, plus brute-force oracles.
//!
//! Generation is institution-centric: every institution gets a number of
//! exhibition slots, each slot's artist gender is drawn from the
//! institution's planted woman probability, and the slot is handed to an
//! artist of that gender in proportion to activity and venue affinity.

pub mod oracle;

use std::collections::{BTreeMap, BinaryHeap, HashSet};
use std::cmp::Reverse;
use std::path::Path;

use chrono::{Datelike, Days, NaiveDate};
use nalgebra::{DMatrix, DVector};
use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{LogNormal, Poisson};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bftest::Category;
use crate::careers::CoGender;
use crate::corpus::{
    write_raw, ArtistRecord, AuctionRecord, CorpusError, ExhibitionEvent, FileCounts, Gender, InstitutionType,
    RawCorpus, RecordedGender,
};
use crate::regress::{Design, RegressError};

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid world spec: {0}")]
    InvalidSpec(String),
    #[error("infeasible world spec: {0}")]
    Infeasible(String),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstitutionGroup {
    pub label: String,
    pub count: usize,
    /// Planted probability that an exhibition slot goes to a woman.
    pub p_woman: f64,
    pub min_exhibitions: usize,
    pub max_exhibitions: usize,
    pub institution_type: InstitutionType,
    pub country: String,
    /// Artists only exhibit inside their own cluster.
    #[serde(default)]
    pub cluster: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CareerSpec {
    pub min_length: u32,
    pub max_length: u32,
    /// Expected exhibitions per career year, drawn log-uniformly.
    pub min_rate: f64,
    pub max_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreferenceSpec {
    /// Extra affinity multiplier for the preferred group; 0 disables preferences.
    pub strength: f64,
    /// Per-group weights for drawing a man's preferred group.
    pub man_weights: Vec<f64>,
    pub woman_weights: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuctionSpec {
    pub intercept: f64,
    /// Coefficient on ln(exhibitions per year).
    pub b_epy: f64,
    /// Coefficient on ln(career length).
    pub b_cl: f64,
    pub b_woman: f64,
    /// Mean number of records for an auctioned artist (at least 1).
    pub mean_records: f64,
    pub ln_price_mu: f64,
    pub ln_price_sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldSpec {
    pub seed: u64,
    pub n_artists: usize,
    /// Exact share of women among artists (rounded to a whole count).
    pub women_fraction: f64,
    pub first_year: i32,
    pub last_year: i32,
    pub groups: Vec<InstitutionGroup>,
    pub career: CareerSpec,
    pub preference: PreferenceSpec,
    pub auctions: AuctionSpec,
    /// Share of artists whose gender is only known through inference.
    pub inferred_share: f64,
}

impl WorldSpec {
    /// A mid-sized world with man-leaning, neutral, balanced and
    /// woman-leaning venues plus a long tail of small galleries.
    pub fn standard(seed: u64, n_artists: usize) -> Self {
        let group = |label: &str, count, p_woman, lo, hi, t, country: &str| InstitutionGroup {
            label: label.into(),
            count,
            p_woman,
            min_exhibitions: lo,
            max_exhibitions: hi,
            institution_type: t,
            country: country.into(),
            cluster: 0,
        };
        let scale = n_artists as f64 / 10_000.0;
        let n = |k: f64| ((k * scale).round() as usize).max(1);
        Self {
            seed,
            n_artists,
            women_fraction: 0.365,
            first_year: 1990,
            last_year: 2019,
            groups: vec![
                group("man_leaning", n(40.0), 0.15, 150, 500, InstitutionType::Museum, "US"),
                group("neutral", n(60.0), 0.365, 150, 500, InstitutionType::Museum, "DE"),
                group("balanced", n(40.0), 0.5, 150, 500, InstitutionType::Gallery, "GB"),
                group("woman_leaning", n(20.0), 0.7, 150, 500, InstitutionType::Gallery, "FR"),
                group("small_galleries", n(400.0), 0.365, 5, 30, InstitutionType::Gallery, "IT"),
            ],
            career: CareerSpec { min_length: 1, max_length: 25, min_rate: 0.3, max_rate: 6.0 },
            preference: PreferenceSpec {
                strength: 4.0,
                man_weights: vec![0.35, 0.3, 0.2, 0.05, 0.1],
                woman_weights: vec![0.1, 0.3, 0.25, 0.25, 0.1],
            },
            auctions: AuctionSpec {
                intercept: -2.5,
                b_epy: 0.6,
                b_cl: 0.5,
                b_woman: -0.45,
                mean_records: 4.0,
                ln_price_mu: 10.0,
                ln_price_sigma: 1.2,
            },
            inferred_share: 0.2,
        }
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: String| Err(SynthError::InvalidSpec(m));
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        if self.n_artists == 0 {
            return bad("n_artists must be positive".into());
        }
        if !unit(self.women_fraction) || !unit(self.inferred_share) {
            return bad("women_fraction and inferred_share must lie in [0, 1]".into());
        }
        if self.first_year > self.last_year {
            return bad(format!("first_year {} after last_year {}", self.first_year, self.last_year));
        }
        if self.groups.is_empty() {
            return bad("at least one institution group is required".into());
        }
        for g in &self.groups {
            if g.count == 0 || !unit(g.p_woman) || g.min_exhibitions == 0 || g.min_exhibitions > g.max_exhibitions {
                return bad(format!("group `{}` needs count > 0, p_woman in [0, 1] and 0 < min <= max exhibitions", g.label));
            }
        }
        let c = &self.career;
        let span = (self.last_year - self.first_year + 1) as u32;
        if c.min_length == 0 || c.min_length > c.max_length || c.max_length > span {
            return bad(format!("career lengths must satisfy 1 <= min <= max <= {span}"));
        }
        if !(c.min_rate > 0.0 && c.min_rate <= c.max_rate && c.max_rate.is_finite()) {
            return bad("career rates must satisfy 0 < min_rate <= max_rate".into());
        }
        let p = &self.preference;
        if p.man_weights.len() != self.groups.len() || p.woman_weights.len() != self.groups.len() {
            return bad("preference weights need one entry per group".into());
        }
        if !(p.strength >= 0.0 && p.strength.is_finite())
            || p.man_weights.iter().chain(&p.woman_weights).any(|w| !(*w >= 0.0 && w.is_finite()))
        {
            return bad("preference strength and weights must be finite and non-negative".into());
        }
        let a = &self.auctions;
        if ![a.intercept, a.b_epy, a.b_cl, a.b_woman, a.ln_price_mu].iter().all(|v| v.is_finite())
            || !(a.mean_records >= 1.0 && a.mean_records.is_finite())
            || !(a.ln_price_sigma >= 0.0 && a.ln_price_sigma.is_finite())
        {
            return bad("auction parameters must be finite with mean_records >= 1 and ln_price_sigma >= 0".into());
        }
        Ok(())
    }
}

/// Planted label of a share `p` against a null `p0`; `None` for deviations
/// too small to count as planted.
pub fn planted_category(p: f64, p0: f64) -> Option<Category> {
    let d = p - p0;
    if d.abs() <= 1e-9 {
        Some(Category::NullConsistent)
    } else if d.abs() < PLANTED_MIN_DEVIATION - 1e-12 {
        None
    } else if d < 0.0 {
        Some(Category::ManOver)
    } else {
        Some(Category::WomanOver)
    }
}

/// Smallest |p − p0| recorded as a planted over-representation.
pub const PLANTED_MIN_DEVIATION: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedInstitution {
    pub group: String,
    pub p_woman: f64,
    pub exhibitions: usize,
    pub neutral: Option<Category>,
    pub balanced: Option<Category>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedArtist {
    pub gender: Gender,
    pub cluster: u32,
    pub preferred_group: Option<String>,
    /// Co-exhibition label implied by the preferred group under the gender-neutral null.
    pub preferred_co_gender: Option<CoGender>,
    pub exhibitions: usize,
    pub access_probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Truth {
    pub women_fraction: f64,
    pub institutions: BTreeMap<String, PlantedInstitution>,
    pub artists: BTreeMap<String, PlantedArtist>,
    pub access: AuctionSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct World {
    pub spec: WorldSpec,
    pub corpus: RawCorpus,
    pub truth: Truth,
}

// independent random streams per entity class
const STREAM_INSTITUTIONS: u64 = 1;
const STREAM_ARTISTS: u64 = 2;
const STREAM_CAREERS: u64 = 3;
const STREAM_AUCTIONS: u64 = 4;

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

struct ArtistPlan {
    gender: Gender,
    cluster: u32,
    preferred_group: Option<usize>,
    length: u32,
    activity: f64,
    start: i32,
    age: i32,
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

pub fn generate(spec: &WorldSpec) -> Result<World, SynthError> {
    spec.validate()?;
    let n = spec.n_artists;
    let n_women = (n as f64 * spec.women_fraction).round() as usize;
    let p0 = n_women as f64 / n as f64;

    // institutions and their slot genders
    let mut inst_rng = stream(spec.seed, STREAM_INSTITUTIONS);
    let mut institutions: Vec<(String, usize)> = Vec::new();
    let mut slots: Vec<(usize, Gender)> = Vec::new();
    let mut planted = BTreeMap::new();
    for (g, group) in spec.groups.iter().enumerate() {
        for _ in 0..group.count {
            let id = format!("i{:05}", institutions.len());
            let count = inst_rng.gen_range(group.min_exhibitions..=group.max_exhibitions);
            let idx = institutions.len();
            for _ in 0..count {
                let gender = if inst_rng.gen_bool(group.p_woman) { Gender::Woman } else { Gender::Man };
                slots.push((idx, gender));
            }
            planted.insert(
                id.clone(),
                PlantedInstitution {
                    group: group.label.clone(),
                    p_woman: group.p_woman,
                    exhibitions: count,
                    neutral: planted_category(group.p_woman, p0),
                    balanced: planted_category(group.p_woman, 0.5),
                },
            );
            institutions.push((id, g));
        }
    }

    // artists
    let mut art_rng = stream(spec.seed, STREAM_ARTISTS);
    let mut genders: Vec<Gender> = (0..n).map(|i| if i < n_women { Gender::Woman } else { Gender::Man }).collect();
    genders.shuffle(&mut art_rng);
    let mut clusters: Vec<u32> = spec.groups.iter().map(|g| g.cluster).collect();
    clusters.sort_unstable();
    clusters.dedup();
    let span = spec.last_year - spec.first_year + 1;
    let mut plans = Vec::with_capacity(n);
    for &gender in &genders {
        let cluster = clusters[art_rng.gen_range(0..clusters.len())];
        let weights = match gender {
            Gender::Man => &spec.preference.man_weights,
            Gender::Woman => &spec.preference.woman_weights,
        };
        let local: Vec<f64> = spec
            .groups
            .iter()
            .zip(weights)
            .map(|(g, &w)| if g.cluster == cluster { w } else { 0.0 })
            .collect();
        let preferred_group = match WeightedIndex::new(&local) {
            Ok(d) if spec.preference.strength > 0.0 => Some(d.sample(&mut art_rng)),
            _ => None,
        };
        let length = art_rng.gen_range(spec.career.min_length..=spec.career.max_length);
        let rate = (art_rng.gen_range(spec.career.min_rate.ln()..=spec.career.max_rate.ln())).exp();
        let start = art_rng.gen_range(spec.first_year..=spec.first_year + span - length as i32);
        let age = art_rng.gen_range(20..=40);
        plans.push(ArtistPlan { gender, cluster, preferred_group, length, activity: length as f64 * rate, start, age });
    }

    // slot assignment
    let mut car_rng = stream(spec.seed, STREAM_CAREERS);
    let mut samplers: BTreeMap<(Gender, usize), (Vec<usize>, WeightedIndex<f64>)> = BTreeMap::new();
    for gender in Gender::ALL {
        for (g, group) in spec.groups.iter().enumerate() {
            let members: Vec<usize> = (0..n)
                .filter(|&a| plans[a].gender == gender && plans[a].cluster == group.cluster)
                .collect();
            let weights: Vec<f64> = members
                .iter()
                .map(|&a| {
                    let affinity = if plans[a].preferred_group == Some(g) { 1.0 + spec.preference.strength } else { 1.0 };
                    plans[a].activity * affinity
                })
                .collect();
            if let Ok(d) = WeightedIndex::new(&weights) {
                samplers.insert((gender, g), (members, d));
            }
        }
    }
    let mut owned: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (s, &(inst, gender)) in slots.iter().enumerate() {
        let group = institutions[inst].1;
        let (members, dist) = samplers.get(&(gender, group)).ok_or_else(|| {
            SynthError::Infeasible(format!(
                "group `{}` draws {} exhibitions but its cluster has no {} artists",
                spec.groups[group].label,
                gender.as_str(),
                gender.as_str()
            ))
        })?;
        owned[members[dist.sample(&mut car_rng)]].push(s);
    }

    // every artist needs at least one exhibition; take spares from the busiest peers
    // per (gender, cluster): artists with spare slots, busiest first
    type Donors = BinaryHeap<(usize, Reverse<usize>)>;
    let mut heaps: BTreeMap<(Gender, u32), Donors> = BTreeMap::new();
    for (a, plan) in plans.iter().enumerate() {
        if owned[a].len() >= 2 {
            heaps.entry((plan.gender, plan.cluster)).or_default().push((owned[a].len(), Reverse(a)));
        }
    }
    for a in 0..n {
        if !owned[a].is_empty() {
            continue;
        }
        let key = (plans[a].gender, plans[a].cluster);
        let (count, Reverse(donor)) = heaps.get_mut(&key).and_then(BinaryHeap::pop).ok_or_else(|| {
            SynthError::Infeasible(format!(
                "not enough exhibition slots for {} artists in cluster {}",
                key.0.as_str(),
                key.1
            ))
        })?;
        let slot = owned[donor].pop().expect("donor has slots");
        owned[a].push(slot);
        if count > 2 {
            heaps.get_mut(&key).expect("heap exists").push((count - 1, Reverse(donor)));
        }
    }

    // dates
    let mut artists = Vec::with_capacity(n);
    let mut exhibitions = Vec::with_capacity(slots.len());
    let mut planted_artists = BTreeMap::new();
    let mut auction_rng = stream(spec.seed, STREAM_AUCTIONS);
    let price = LogNormal::new(spec.auctions.ln_price_mu, spec.auctions.ln_price_sigma)
        .map_err(|e| SynthError::InvalidSpec(e.to_string()))?;
    let mut auctions = Vec::new();
    for (a, plan) in plans.iter().enumerate() {
        let artist_id = format!("a{a:06}");
        let end = plan.start + plan.length as i32 - 1;
        let year_start = |y: i32| NaiveDate::from_ymd_opt(y, 1, 1).expect("valid year");
        let mut used: HashSet<(usize, NaiveDate)> = HashSet::new();
        let mut dates = Vec::with_capacity(owned[a].len());
        let mut slot_list = owned[a].clone();
        slot_list.sort_unstable();
        for (j, &s) in slot_list.iter().enumerate() {
            let (lo, hi) = if j == 0 { (year_start(plan.start), year_start(plan.start + 1)) } else { (year_start(plan.start), year_start(end + 1)) };
            let days = (hi - lo).num_days() as u64;
            let inst = slots[s].0;
            let mut placed = None;
            for _ in 0..1000 {
                let d = lo + Days::new(car_rng.gen_range(0..days));
                if used.insert((inst, d)) {
                    placed = Some(d);
                    break;
                }
            }
            let d = placed.ok_or_else(|| {
                SynthError::Infeasible(format!("artist {artist_id} has more exhibitions at one venue than career days"))
            })?;
            dates.push(d);
            exhibitions.push(ExhibitionEvent {
                artist_id: artist_id.clone(),
                institution_id: institutions[inst].0.clone(),
                date: d,
                institution_type: spec.groups[institutions[inst].1].institution_type,
                country: spec.groups[institutions[inst].1].country.clone(),
            });
        }

        let first = *dates.iter().min().expect("every artist has an exhibition");
        let last = *dates.iter().max().expect("every artist has an exhibition");
        let career_length = (last.year() - first.year() + 1) as f64;
        let epy = dates.len() as f64 / career_length;
        let woman = if plan.gender == Gender::Woman { 1.0 } else { 0.0 };
        let s = &spec.auctions;
        let p_access = sigmoid(s.intercept + s.b_epy * epy.ln() + s.b_cl * career_length.ln() + s.b_woman * woman);
        if auction_rng.gen_bool(p_access) {
            let extra = if s.mean_records > 1.0 {
                Poisson::new(s.mean_records - 1.0).expect("positive mean").sample(&mut auction_rng) as u64
            } else {
                0
            };
            let window = (year_start(spec.last_year + 1) - first).num_days() as u64;
            for _ in 0..=extra {
                auctions.push(AuctionRecord {
                    artist_id: artist_id.clone(),
                    date: first + Days::new(auction_rng.gen_range(0..window)),
                    raw_price: price.sample(&mut auction_rng),
                    normalized_price: f64::NAN,
                });
            }
        }

        let recorded = |g: Gender| match g {
            Gender::Man => RecordedGender::Man,
            Gender::Woman => RecordedGender::Woman,
        };
        let (curated_gender, inferred_gender, inferred_probability) = if art_rng.gen_bool(spec.inferred_share) {
            let p: f64 = art_rng.gen_range(0.7..=1.0);
            (RecordedGender::Unknown, recorded(plan.gender), Some((p * 1000.0).round() / 1000.0))
        } else {
            (recorded(plan.gender), RecordedGender::Unknown, None)
        };
        artists.push(ArtistRecord {
            artist_id: artist_id.clone(),
            name: format!("Artist {a}"),
            birth_year: Some(plan.start - plan.age),
            curated_gender,
            inferred_gender,
            inferred_probability,
        });

        let preferred = plan.preferred_group.map(|g| &spec.groups[g]);
        planted_artists.insert(
            artist_id,
            PlantedArtist {
                gender: plan.gender,
                cluster: plan.cluster,
                preferred_group: preferred.map(|g| g.label.clone()),
                preferred_co_gender: preferred
                    .and_then(|g| planted_category(g.p_woman, p0))
                    .and_then(CoGender::from_category),
                exhibitions: dates.len(),
                access_probability: p_access,
            },
        );
    }

    exhibitions.sort_by(|x, y| {
        (x.artist_id.as_str(), x.date, x.institution_id.as_str()).cmp(&(y.artist_id.as_str(), y.date, y.institution_id.as_str()))
    });
    auctions.sort_by(|x, y| (x.artist_id.as_str(), x.date).cmp(&(y.artist_id.as_str(), y.date)).then(x.raw_price.total_cmp(&y.raw_price)));
    let corpus = RawCorpus {
        raw_rows: FileCounts { artists: artists.len(), exhibitions: exhibitions.len(), auctions: auctions.len() },
        artists,
        exhibitions,
        auctions,
        rejects: vec![],
    };
    let truth = Truth { women_fraction: p0, institutions: planted, artists: planted_artists, access: spec.auctions.clone() };
    Ok(World { spec: spec.clone(), corpus, truth })
}

/// Writes the three corpus files plus `truth.json` and `worldspec.json`.
pub fn write_world(world: &World, dir: &Path) -> Result<(), SynthError> {
    std::fs::create_dir_all(dir).map_err(|source| SynthError::Io { path: dir.display().to_string(), source })?;
    write_raw(&world.corpus, dir)?;
    for (name, value) in [
        ("truth.json", serde_json::to_string_pretty(&world.truth)?),
        ("worldspec.json", serde_json::to_string_pretty(&world.spec)?),
    ] {
        let path = dir.join(name);
        std::fs::write(&path, value + "\n").map_err(|source| SynthError::Io { path: path.display().to_string(), source })?;
    }
    Ok(())
}

pub fn read_truth(path: &Path) -> Result<Truth, SynthError> {
    let text = std::fs::read_to_string(path).map_err(|source| SynthError::Io { path: path.display().to_string(), source })?;
    Ok(serde_json::from_str(&text)?)
}

/// Logistic-regression data drawn from known coefficients.
///
/// Column 0 is the intercept, columns 1 and 2 are uniform on [0, 1] and
/// any further columns are fair 0/1 dummies.
pub fn logistic_sample(n: usize, beta: &[f64], seed: u64) -> Result<Design, RegressError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = beta.len();
    let mut x = DMatrix::zeros(n, k);
    let mut y = DVector::zeros(n);
    for i in 0..n {
        let mut eta = 0.0;
        for (j, b) in beta.iter().enumerate() {
            let v = match j {
                0 => 1.0,
                1 | 2 => rng.gen::<f64>(),
                _ => f64::from(u8::from(rng.gen_bool(0.5))),
            };
            x[(i, j)] = v;
            eta += b * v;
        }
        y[i] = f64::from(u8::from(rng.gen_bool(sigmoid(eta))));
    }
    let columns = (0..k).map(|j| if j == 0 { "intercept".to_string() } else { format!("x{j}") }).collect();
    Design::from_matrix(columns, x, y)
}
