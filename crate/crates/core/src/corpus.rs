//! Canonical data model, CSV ingestion, gender resolution, career filters
//! and auction price normalization.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::io::Read;
use std::path::Path;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const ARTIST_HEADER: [&str; 6] = [
    "artist_id",
    "name",
    "birth_year",
    "curated_gender",
    "inferred_gender",
    "inferred_probability",
];
pub const EXHIBITION_HEADER: [&str; 5] = ["artist_id", "institution_id", "date", "institution_type", "country"];
pub const AUCTION_HEADER: [&str; 3] = ["artist_id", "date", "price_usd2013"];

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("missing input file {path}")]
    MissingFile { path: String },
    #[error("{file}: expected header `{expected}`, found `{found}`")]
    Header { file: String, expected: String, found: String },
    #[error("{file}: duplicate artist_id `{id}` at row {row}")]
    DuplicateArtist { file: String, id: String, row: usize },
    #[error("{file}: {source}")]
    Csv {
        file: String,
        #[source]
        source: csv::Error,
    },
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid filter configuration: {0}")]
    Config(String),
}

/// Gender as recorded in an input column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordedGender {
    Man,
    Woman,
    Unknown,
}

impl RecordedGender {
    fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "" | "unknown" => Some(Self::Unknown),
            "man" | "male" | "m" => Some(Self::Man),
            "woman" | "female" | "w" | "f" => Some(Self::Woman),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Man => "man",
            Self::Woman => "woman",
            Self::Unknown => "unknown",
        }
    }
}

/// Resolved binary gender of a retained artist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gender {
    Man,
    Woman,
}

impl Gender {
    pub const ALL: [Gender; 2] = [Gender::Man, Gender::Woman];

    pub fn as_str(self) -> &'static str {
        match self {
            Gender::Man => "man",
            Gender::Woman => "woman",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match RecordedGender::parse(s)? {
            RecordedGender::Man => Some(Gender::Man),
            RecordedGender::Woman => Some(Gender::Woman),
            RecordedGender::Unknown => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenderResolution {
    Resolved(Gender),
    Excluded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstitutionType {
    Museum,
    Gallery,
    Other,
}

impl InstitutionType {
    fn parse(s: &str) -> Self {
        match s.trim().to_ascii_lowercase().as_str() {
            "museum" => Self::Museum,
            "gallery" => Self::Gallery,
            _ => Self::Other,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Museum => "museum",
            Self::Gallery => "gallery",
            Self::Other => "other",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArtistRecord {
    pub artist_id: String,
    pub name: String,
    pub birth_year: Option<i32>,
    pub curated_gender: RecordedGender,
    pub inferred_gender: RecordedGender,
    pub inferred_probability: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ExhibitionEvent {
    pub artist_id: String,
    pub institution_id: String,
    pub date: NaiveDate,
    pub institution_type: InstitutionType,
    pub country: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuctionRecord {
    pub artist_id: String,
    pub date: NaiveDate,
    pub raw_price: f64,
    pub normalized_price: f64,
}

/// A malformed input row, reported instead of being dropped silently.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reject {
    pub file: String,
    pub row: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawCorpus {
    pub artists: Vec<ArtistRecord>,
    pub exhibitions: Vec<ExhibitionEvent>,
    pub auctions: Vec<AuctionRecord>,
    pub rejects: Vec<Reject>,
    pub raw_rows: FileCounts,
}

/// Per-file row tallies.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileCounts {
    pub artists: usize,
    pub exhibitions: usize,
    pub auctions: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Artist {
    pub artist_id: String,
    pub name: String,
    pub birth_year: Option<i32>,
    pub gender: Gender,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterConfig {
    pub start_year: i32,
    pub min_age: i32,
    pub max_start_age: i32,
    pub gender_threshold: f64,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self { start_year: 1990, min_age: 18, max_start_age: 50, gender_threshold: 0.6 }
    }
}

impl FilterConfig {
    pub fn validate(&self) -> Result<(), CorpusError> {
        if !(self.gender_threshold > 0.5 && self.gender_threshold <= 1.0) {
            return Err(CorpusError::Config(format!(
                "gender threshold {} outside (0.5, 1]",
                self.gender_threshold
            )));
        }
        if self.min_age > self.max_start_age {
            return Err(CorpusError::Config(format!(
                "min age {} exceeds max start age {}",
                self.min_age, self.max_start_age
            )));
        }
        Ok(())
    }
}

/// Why rows left the corpus during filtering.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterReport {
    pub artists_gender_excluded: usize,
    pub artists_no_exhibitions: usize,
    pub artists_age_excluded: usize,
    pub artists_before_start_year: usize,
    pub exhibitions_duplicate: usize,
    pub exhibitions_dropped_artist: usize,
    pub exhibitions_before_adulthood: usize,
    pub auctions_dropped_artist: usize,
    pub auctions_before_adulthood: usize,
}

impl FilterReport {
    pub fn filtered(&self) -> FileCounts {
        FileCounts {
            artists: self.artists_gender_excluded
                + self.artists_no_exhibitions
                + self.artists_age_excluded
                + self.artists_before_start_year,
            exhibitions: self.exhibitions_duplicate
                + self.exhibitions_dropped_artist
                + self.exhibitions_before_adulthood,
            auctions: self.auctions_dropped_artist + self.auctions_before_adulthood,
        }
    }
}

/// Immutable cleaned corpus consumed by every downstream stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CleanCorpus {
    /// Sorted by `artist_id`.
    pub artists: Vec<Artist>,
    /// Sorted by (artist, date, institution).
    pub exhibitions: Vec<ExhibitionEvent>,
    /// Sorted by (artist, date, price).
    pub auctions: Vec<AuctionRecord>,
    pub women_fraction: f64,
    pub warnings: Vec<String>,
}

impl CleanCorpus {
    /// Assembles a corpus from already-clean parts, sorting and recomputing derived fields.
    pub fn from_parts(
        mut artists: Vec<Artist>,
        mut exhibitions: Vec<ExhibitionEvent>,
        mut auctions: Vec<AuctionRecord>,
    ) -> Self {
        artists.sort_by(|a, b| a.artist_id.cmp(&b.artist_id));
        exhibitions.sort_by(exhibition_order);
        auctions.sort_by(auction_order);
        let women_fraction = women_fraction(&artists);
        let mut warnings = Vec::new();
        if artists.is_empty() {
            warnings.push("corpus is empty after filtering".to_string());
        }
        Self { artists, exhibitions, auctions, women_fraction, warnings }
    }

    pub fn gender_of(&self) -> HashMap<&str, Gender> {
        self.artists.iter().map(|a| (a.artist_id.as_str(), a.gender)).collect()
    }

    /// Exhibitions grouped per artist, each group in career order.
    pub fn exhibitions_by_artist(&self) -> BTreeMap<&str, Vec<&ExhibitionEvent>> {
        let mut out: BTreeMap<&str, Vec<&ExhibitionEvent>> = BTreeMap::new();
        for e in &self.exhibitions {
            out.entry(e.artist_id.as_str()).or_default().push(e);
        }
        for list in out.values_mut() {
            list.sort_by(|a, b| career_order(a, b));
        }
        out
    }

    /// Converts back into raw form with curated genders, so filters can be re-applied.
    pub fn to_raw(&self) -> RawCorpus {
        let artists = self
            .artists
            .iter()
            .map(|a| ArtistRecord {
                artist_id: a.artist_id.clone(),
                name: a.name.clone(),
                birth_year: a.birth_year,
                curated_gender: match a.gender {
                    Gender::Man => RecordedGender::Man,
                    Gender::Woman => RecordedGender::Woman,
                },
                inferred_gender: RecordedGender::Unknown,
                inferred_probability: None,
            })
            .collect::<Vec<_>>();
        RawCorpus {
            raw_rows: FileCounts {
                artists: artists.len(),
                exhibitions: self.exhibitions.len(),
                auctions: self.auctions.len(),
            },
            artists,
            exhibitions: self.exhibitions.clone(),
            auctions: self.auctions.clone(),
            rejects: Vec::new(),
        }
    }
}

fn women_fraction(artists: &[Artist]) -> f64 {
    if artists.is_empty() {
        return 0.0;
    }
    let women = artists.iter().filter(|a| a.gender == Gender::Woman).count();
    women as f64 / artists.len() as f64
}

/// Career order for a single artist: by date, same-day ties by institution id.
pub fn career_order(a: &ExhibitionEvent, b: &ExhibitionEvent) -> std::cmp::Ordering {
    a.date.cmp(&b.date).then_with(|| a.institution_id.cmp(&b.institution_id))
}

fn exhibition_order(a: &ExhibitionEvent, b: &ExhibitionEvent) -> std::cmp::Ordering {
    a.artist_id.cmp(&b.artist_id).then_with(|| career_order(a, b)).then_with(|| a.cmp(b))
}

fn auction_order(a: &AuctionRecord, b: &AuctionRecord) -> std::cmp::Ordering {
    a.artist_id
        .cmp(&b.artist_id)
        .then_with(|| a.date.cmp(&b.date))
        .then_with(|| a.raw_price.total_cmp(&b.raw_price))
}

// ---------------------------------------------------------------------------
// ingestion

fn open(path: &Path) -> Result<std::fs::File, CorpusError> {
    std::fs::File::open(path).map_err(|source| {
        if source.kind() == std::io::ErrorKind::NotFound {
            CorpusError::MissingFile { path: path.display().to_string() }
        } else {
            CorpusError::Io { path: path.display().to_string(), source }
        }
    })
}

fn file_label(path: &Path) -> String {
    path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| path.display().to_string())
}

/// Reads the three input files.
pub fn ingest(artist_file: &Path, exhibition_file: &Path, auction_file: &Path) -> Result<RawCorpus, CorpusError> {
    let artists = open(artist_file)?;
    let exhibitions = open(exhibition_file)?;
    let auctions = open(auction_file)?;
    ingest_readers(
        (file_label(artist_file), artists),
        (file_label(exhibition_file), exhibitions),
        (file_label(auction_file), auctions),
    )
}

/// Same as [`ingest`] over arbitrary readers labelled with a file name.
pub fn ingest_readers<A: Read, E: Read, U: Read>(
    artists: (String, A),
    exhibitions: (String, E),
    auctions: (String, U),
) -> Result<RawCorpus, CorpusError> {
    let mut corpus = RawCorpus::default();

    let (label, reader) = artists;
    let rows = read_rows(&label, reader, &ARTIST_HEADER)?;
    corpus.raw_rows.artists = rows.len();
    let mut seen = HashSet::new();
    for (row, record) in rows {
        match parse_artist(&record) {
            Ok(artist) => {
                if !seen.insert(artist.artist_id.clone()) {
                    return Err(CorpusError::DuplicateArtist { file: label, id: artist.artist_id, row });
                }
                corpus.artists.push(artist);
            }
            Err(reason) => corpus.rejects.push(Reject { file: label.clone(), row, reason }),
        }
    }

    let (label, reader) = exhibitions;
    let rows = read_rows(&label, reader, &EXHIBITION_HEADER)?;
    corpus.raw_rows.exhibitions = rows.len();
    for (row, record) in rows {
        match parse_exhibition(&record, &seen) {
            Ok(e) => corpus.exhibitions.push(e),
            Err(reason) => corpus.rejects.push(Reject { file: label.clone(), row, reason }),
        }
    }

    let (label, reader) = auctions;
    let rows = read_rows(&label, reader, &AUCTION_HEADER)?;
    corpus.raw_rows.auctions = rows.len();
    for (row, record) in rows {
        match parse_auction(&record, &seen) {
            Ok(a) => corpus.auctions.push(a),
            Err(reason) => corpus.rejects.push(Reject { file: label.clone(), row, reason }),
        }
    }

    Ok(corpus)
}

type Rows = Vec<(usize, Result<Vec<String>, String>)>;

// Row numbers are 1-based file lines, so the first data row is row 2.
fn read_rows<R: Read>(label: &str, reader: R, header: &[&str]) -> Result<Rows, CorpusError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(reader);
    let found = rdr
        .headers()
        .map_err(|source| CorpusError::Csv { file: label.to_string(), source })?
        .iter()
        .map(|h| h.trim().to_string())
        .collect::<Vec<_>>();
    if found != header {
        return Err(CorpusError::Header {
            file: label.to_string(),
            expected: header.join(","),
            found: found.join(","),
        });
    }
    let mut out = Vec::new();
    for (i, result) in rdr.records().enumerate() {
        let row = i + 2;
        let parsed = match result {
            Ok(rec) if rec.len() == header.len() => Ok(rec.iter().map(|f| f.trim().to_string()).collect()),
            Ok(rec) => Err(format!("expected {} columns, found {}", header.len(), rec.len())),
            Err(e) => Err(format!("unreadable row: {e}")),
        };
        out.push((row, parsed));
    }
    Ok(out)
}

fn parse_date(s: &str) -> Result<NaiveDate, String> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d").map_err(|_| format!("unparseable date `{s}`"))
}

fn parse_artist(record: &Result<Vec<String>, String>) -> Result<ArtistRecord, String> {
    let f = record.as_ref().map_err(Clone::clone)?;
    let artist_id = f[0].clone();
    if artist_id.is_empty() {
        return Err("empty artist_id".into());
    }
    let birth_year = match f[2].as_str() {
        "" => None,
        s => Some(s.parse::<i32>().map_err(|_| format!("unparseable birth_year `{s}`"))?),
    };
    let curated_gender =
        RecordedGender::parse(&f[3]).ok_or_else(|| format!("unknown curated_gender `{}`", f[3]))?;
    let inferred_gender =
        RecordedGender::parse(&f[4]).ok_or_else(|| format!("unknown inferred_gender `{}`", f[4]))?;
    let inferred_probability = match f[5].as_str() {
        "" => None,
        s => {
            let p = s.parse::<f64>().map_err(|_| format!("unparseable inferred_probability `{s}`"))?;
            if !(0.0..=1.0).contains(&p) {
                return Err(format!("inferred_probability {p} outside [0, 1]"));
            }
            Some(p)
        }
    };
    if (inferred_gender == RecordedGender::Unknown) != inferred_probability.is_none() {
        return Err("inferred_probability must be present exactly when inferred_gender is known".into());
    }
    Ok(ArtistRecord {
        artist_id,
        name: f[1].clone(),
        birth_year,
        curated_gender,
        inferred_gender,
        inferred_probability,
    })
}

fn parse_exhibition(record: &Result<Vec<String>, String>, known: &HashSet<String>) -> Result<ExhibitionEvent, String> {
    let f = record.as_ref().map_err(Clone::clone)?;
    if !known.contains(&f[0]) {
        return Err(format!("unknown artist_id `{}`", f[0]));
    }
    if f[1].is_empty() {
        return Err("empty institution_id".into());
    }
    Ok(ExhibitionEvent {
        artist_id: f[0].clone(),
        institution_id: f[1].clone(),
        date: parse_date(&f[2])?,
        institution_type: InstitutionType::parse(&f[3]),
        country: f[4].clone(),
    })
}

fn parse_auction(record: &Result<Vec<String>, String>, known: &HashSet<String>) -> Result<AuctionRecord, String> {
    let f = record.as_ref().map_err(Clone::clone)?;
    if !known.contains(&f[0]) {
        return Err(format!("unknown artist_id `{}`", f[0]));
    }
    let date = parse_date(&f[1])?;
    let raw_price = f[2].parse::<f64>().map_err(|_| format!("unparseable price `{}`", f[2]))?;
    if !(raw_price.is_finite() && raw_price > 0.0) {
        return Err(format!("price must be positive, got {raw_price}"));
    }
    Ok(AuctionRecord { artist_id: f[0].clone(), date, raw_price, normalized_price: f64::NAN })
}

// ---------------------------------------------------------------------------
// gender

/// Curated gender wins; otherwise inference is accepted at or above `threshold`.
pub fn resolve_gender(artist: &ArtistRecord, threshold: f64) -> GenderResolution {
    match artist.curated_gender {
        RecordedGender::Man => return GenderResolution::Resolved(Gender::Man),
        RecordedGender::Woman => return GenderResolution::Resolved(Gender::Woman),
        RecordedGender::Unknown => {}
    }
    match (artist.inferred_gender, artist.inferred_probability) {
        (RecordedGender::Man, Some(p)) if p >= threshold => GenderResolution::Resolved(Gender::Man),
        (RecordedGender::Woman, Some(p)) if p >= threshold => GenderResolution::Resolved(Gender::Woman),
        _ => GenderResolution::Excluded,
    }
}

// ---------------------------------------------------------------------------
// filters

/// Resolves genders, applies the age and start-year career filters, drops
/// records from before adulthood and normalizes auction prices.
pub fn apply_career_filters(raw: &RawCorpus, cfg: &FilterConfig) -> Result<(CleanCorpus, FilterReport), CorpusError> {
    cfg.validate()?;
    let mut report = FilterReport::default();

    let mut resolved: BTreeMap<&str, (&ArtistRecord, Gender)> = BTreeMap::new();
    for a in &raw.artists {
        match resolve_gender(a, cfg.gender_threshold) {
            GenderResolution::Resolved(g) => {
                resolved.insert(a.artist_id.as_str(), (a, g));
            }
            GenderResolution::Excluded => report.artists_gender_excluded += 1,
        }
    }

    // (artist, institution, date) identifies one exhibition appearance.
    let mut seen: HashSet<(&str, &str, NaiveDate)> = HashSet::new();
    let mut per_artist: BTreeMap<&str, Vec<&ExhibitionEvent>> = BTreeMap::new();
    for e in &raw.exhibitions {
        if !seen.insert((e.artist_id.as_str(), e.institution_id.as_str(), e.date)) {
            report.exhibitions_duplicate += 1;
            continue;
        }
        if resolved.contains_key(e.artist_id.as_str()) {
            per_artist.entry(e.artist_id.as_str()).or_default().push(e);
        } else {
            report.exhibitions_dropped_artist += 1;
        }
    }

    let mut artists = Vec::new();
    let mut exhibitions = Vec::new();
    let mut adult_from: HashMap<&str, Option<i32>> = HashMap::new();
    for (id, (record, gender)) in &resolved {
        let Some(events) = per_artist.get(id) else {
            report.artists_no_exhibitions += 1;
            continue;
        };
        let first_year = events.iter().map(|e| e.date.year()).min().expect("non-empty");
        if let Some(birth) = record.birth_year {
            let start_age = first_year - birth;
            if start_age < cfg.min_age || start_age > cfg.max_start_age {
                report.artists_age_excluded += 1;
                report.exhibitions_dropped_artist += events.len();
                continue;
            }
        }
        if first_year < cfg.start_year {
            report.artists_before_start_year += 1;
            report.exhibitions_dropped_artist += events.len();
            continue;
        }
        let adult_year = record.birth_year.map(|b| b + cfg.min_age);
        for e in events {
            if adult_year.is_some_and(|y| e.date.year() < y) {
                report.exhibitions_before_adulthood += 1;
            } else {
                exhibitions.push((*e).clone());
            }
        }
        adult_from.insert(id, adult_year);
        artists.push(Artist {
            artist_id: record.artist_id.clone(),
            name: record.name.clone(),
            birth_year: record.birth_year,
            gender: *gender,
        });
    }

    let mut auctions = Vec::new();
    for a in &raw.auctions {
        match adult_from.get(a.artist_id.as_str()) {
            None => report.auctions_dropped_artist += 1,
            Some(Some(y)) if a.date.year() < *y => report.auctions_before_adulthood += 1,
            Some(_) => auctions.push(a.clone()),
        }
    }
    normalize_prices(&mut auctions);

    let corpus = CleanCorpus::from_parts(artists, exhibitions, auctions);
    Ok((corpus, report))
}

/// Divides each price by the mean raw price of its calendar year.
pub fn normalize_prices(auctions: &mut [AuctionRecord]) {
    let mut sums: BTreeMap<i32, (f64, usize)> = BTreeMap::new();
    for a in auctions.iter() {
        let entry = sums.entry(a.date.year()).or_insert((0.0, 0));
        entry.0 += a.raw_price;
        entry.1 += 1;
    }
    for a in auctions.iter_mut() {
        let (sum, count) = sums[&a.date.year()];
        a.normalized_price = if count == 1 { 1.0 } else { a.raw_price / (sum / count as f64) };
    }
}

/// Distinct institution ids in the corpus.
pub fn institution_ids(corpus: &CleanCorpus) -> BTreeSet<&str> {
    corpus.exhibitions.iter().map(|e| e.institution_id.as_str()).collect()
}

// ---------------------------------------------------------------------------
// serialization of the cleaned corpus

pub const CLEAN_ARTIST_HEADER: [&str; 4] = ["artist_id", "name", "birth_year", "gender"];
pub const CLEAN_AUCTION_HEADER: [&str; 4] = ["artist_id", "date", "price_usd2013", "normalized_price"];

/// Writes the cleaned corpus as three CSV files into `dir`.
pub fn write_clean(corpus: &CleanCorpus, dir: &Path) -> Result<(), CorpusError> {
    let csv_err = |file: &str| {
        let file = file.to_string();
        move |source| CorpusError::Csv { file: file.clone(), source }
    };
    let mut w = csv::Writer::from_path(dir.join("artists.csv")).map_err(csv_err("artists.csv"))?;
    w.write_record(CLEAN_ARTIST_HEADER).map_err(csv_err("artists.csv"))?;
    for a in &corpus.artists {
        let birth = a.birth_year.map(|b| b.to_string()).unwrap_or_default();
        w.write_record([a.artist_id.as_str(), a.name.as_str(), birth.as_str(), a.gender.as_str()])
            .map_err(csv_err("artists.csv"))?;
    }
    w.flush().map_err(|source| CorpusError::Io { path: "artists.csv".into(), source })?;

    let mut w = csv::Writer::from_path(dir.join("exhibitions.csv")).map_err(csv_err("exhibitions.csv"))?;
    w.write_record(EXHIBITION_HEADER).map_err(csv_err("exhibitions.csv"))?;
    for e in &corpus.exhibitions {
        let date = e.date.format("%Y-%m-%d").to_string();
        w.write_record([
            e.artist_id.as_str(),
            e.institution_id.as_str(),
            date.as_str(),
            e.institution_type.as_str(),
            e.country.as_str(),
        ])
        .map_err(csv_err("exhibitions.csv"))?;
    }
    w.flush().map_err(|source| CorpusError::Io { path: "exhibitions.csv".into(), source })?;

    let mut w = csv::Writer::from_path(dir.join("auctions.csv")).map_err(csv_err("auctions.csv"))?;
    w.write_record(CLEAN_AUCTION_HEADER).map_err(csv_err("auctions.csv"))?;
    for a in &corpus.auctions {
        w.write_record([
            a.artist_id.clone(),
            a.date.format("%Y-%m-%d").to_string(),
            a.raw_price.to_string(),
            a.normalized_price.to_string(),
        ])
        .map_err(csv_err("auctions.csv"))?;
    }
    w.flush().map_err(|source| CorpusError::Io { path: "auctions.csv".into(), source })?;
    Ok(())
}

/// Writes a raw corpus in the ingest schemas (`artists.csv`, `exhibitions.csv`, `auctions.csv`).
pub fn write_raw(corpus: &RawCorpus, dir: &Path) -> Result<(), CorpusError> {
    let csv_err = |file: &str| {
        let file = file.to_string();
        move |source| CorpusError::Csv { file: file.clone(), source }
    };
    let recorded = |g: RecordedGender| if g == RecordedGender::Unknown { "" } else { g.as_str() };

    let mut w = csv::Writer::from_path(dir.join("artists.csv")).map_err(csv_err("artists.csv"))?;
    w.write_record(ARTIST_HEADER).map_err(csv_err("artists.csv"))?;
    for a in &corpus.artists {
        w.write_record([
            a.artist_id.clone(),
            a.name.clone(),
            a.birth_year.map(|b| b.to_string()).unwrap_or_default(),
            recorded(a.curated_gender).to_string(),
            recorded(a.inferred_gender).to_string(),
            a.inferred_probability.map(|p| p.to_string()).unwrap_or_default(),
        ])
        .map_err(csv_err("artists.csv"))?;
    }
    w.flush().map_err(|source| CorpusError::Io { path: "artists.csv".into(), source })?;

    let mut w = csv::Writer::from_path(dir.join("exhibitions.csv")).map_err(csv_err("exhibitions.csv"))?;
    w.write_record(EXHIBITION_HEADER).map_err(csv_err("exhibitions.csv"))?;
    for e in &corpus.exhibitions {
        let date = e.date.format("%Y-%m-%d").to_string();
        w.write_record([
            e.artist_id.as_str(),
            e.institution_id.as_str(),
            date.as_str(),
            e.institution_type.as_str(),
            e.country.as_str(),
        ])
        .map_err(csv_err("exhibitions.csv"))?;
    }
    w.flush().map_err(|source| CorpusError::Io { path: "exhibitions.csv".into(), source })?;

    let mut w = csv::Writer::from_path(dir.join("auctions.csv")).map_err(csv_err("auctions.csv"))?;
    w.write_record(AUCTION_HEADER).map_err(csv_err("auctions.csv"))?;
    for a in &corpus.auctions {
        w.write_record([a.artist_id.clone(), a.date.format("%Y-%m-%d").to_string(), a.raw_price.to_string()])
            .map_err(csv_err("auctions.csv"))?;
    }
    w.flush().map_err(|source| CorpusError::Io { path: "auctions.csv".into(), source })?;
    Ok(())
}

/// Reads a corpus previously written by [`write_clean`].
pub fn read_clean(dir: &Path) -> Result<CleanCorpus, CorpusError> {
    fn fail(file: &str, row: usize, what: &str) -> CorpusError {
        CorpusError::Config(format!("{file} row {row}: {what}"))
    }
    let mut artists = Vec::new();
    for (row, rec) in read_rows("artists.csv", open(&dir.join("artists.csv"))?, &CLEAN_ARTIST_HEADER)? {
        let f = rec.map_err(|e| fail("artists.csv", row, &e))?;
        artists.push(Artist {
            artist_id: f[0].clone(),
            name: f[1].clone(),
            birth_year: if f[2].is_empty() {
                None
            } else {
                Some(f[2].parse().map_err(|_| fail("artists.csv", row, "bad birth_year"))?)
            },
            gender: Gender::parse(&f[3]).ok_or_else(|| fail("artists.csv", row, "bad gender"))?,
        });
    }
    let known: HashSet<String> = artists.iter().map(|a| a.artist_id.clone()).collect();
    let mut exhibitions = Vec::new();
    for (row, rec) in read_rows("exhibitions.csv", open(&dir.join("exhibitions.csv"))?, &EXHIBITION_HEADER)? {
        exhibitions.push(parse_exhibition(&rec, &known).map_err(|e| fail("exhibitions.csv", row, &e))?);
    }
    let mut auctions = Vec::new();
    for (row, rec) in read_rows("auctions.csv", open(&dir.join("auctions.csv"))?, &CLEAN_AUCTION_HEADER)? {
        let f = rec.map_err(|e| fail("auctions.csv", row, &e))?;
        let mut a = parse_auction(&Ok(f[..3].to_vec()), &known).map_err(|e| fail("auctions.csv", row, &e))?;
        a.normalized_price = f[3].parse().map_err(|_| fail("auctions.csv", row, "bad normalized_price"))?;
        auctions.push(a);
    }
    Ok(CleanCorpus::from_parts(artists, exhibitions, auctions))
}
