//! Gender disparity metrics over exhibitions and auction records, and
//! auction access rates as a function of career features.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::careers::CareerFeatures;
use crate::corpus::{CleanCorpus, Gender};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    ArtistPopulation,
    ExhibitionCount,
    AuctionPopulation,
    AccessRate,
    AuctionRecords,
    AverageNormalizedPrice,
    AuctionsPerAuctionedArtist,
    TotalNormalizedSales,
}

impl Metric {
    pub const ALL: [Metric; 8] = [
        Metric::ArtistPopulation,
        Metric::ExhibitionCount,
        Metric::AuctionPopulation,
        Metric::AccessRate,
        Metric::AuctionRecords,
        Metric::AverageNormalizedPrice,
        Metric::AuctionsPerAuctionedArtist,
        Metric::TotalNormalizedSales,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Self::ArtistPopulation => "Population",
            Self::ExhibitionCount => "Exhibitions",
            Self::AuctionPopulation => "Auction population",
            Self::AccessRate => "Auction access rate",
            Self::AuctionRecords => "Auction records",
            Self::AverageNormalizedPrice => "Average auction price",
            Self::AuctionsPerAuctionedArtist => "Auctions per auctioned artist",
            Self::TotalNormalizedSales => "Auction total sales",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub metric: Metric,
    pub man: Option<f64>,
    pub woman: Option<f64>,
    /// man / woman.
    pub ratio: Option<f64>,
    pub note: Option<String>,
}

impl MetricRow {
    pub fn new(metric: Metric, man: Option<f64>, woman: Option<f64>) -> Self {
        let (ratio, note) = match (man, woman) {
            (_, None) => (None, Some("no value for women".to_string())),
            (None, _) => (None, Some("no value for men".to_string())),
            (Some(_), Some(0.0)) => (None, Some("woman value is zero".to_string())),
            (Some(m), Some(w)) => (Some(m / w), None),
        };
        Self { metric, man, woman, ratio, note }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisparityReport {
    /// In [`Metric::ALL`] order.
    pub rows: Vec<MetricRow>,
    /// Auctioned artists over all artists, both genders.
    pub overall_access_rate: Option<f64>,
}

impl DisparityReport {
    /// Builds a report from `(man, woman)` values given in [`Metric::ALL`] order.
    pub fn from_values(values: [(f64, f64); 8]) -> Self {
        let rows = Metric::ALL.iter().zip(values).map(|(&m, (a, b))| MetricRow::new(m, Some(a), Some(b))).collect();
        Self { rows, overall_access_rate: None }
    }

    pub fn row(&self, metric: Metric) -> &MetricRow {
        self.rows.iter().find(|r| r.metric == metric).expect("every metric present")
    }
}

#[derive(Debug, Default, Clone, Copy)]
struct GenderTally {
    artists: u64,
    exhibitions: u64,
    auctioned: u64,
    records: u64,
    sales: f64,
}

/// Artists with at least one linked auction record.
pub fn auctioned_artists(corpus: &CleanCorpus) -> BTreeSet<&str> {
    corpus.auctions.iter().map(|a| a.artist_id.as_str()).collect()
}

/// The eight man/woman disparity metrics.
pub fn disparity_report(corpus: &CleanCorpus) -> DisparityReport {
    let genders = corpus.gender_of();
    let auctioned = auctioned_artists(corpus);
    let mut tally: BTreeMap<Gender, GenderTally> = Gender::ALL.iter().map(|&g| (g, GenderTally::default())).collect();
    for a in &corpus.artists {
        let t = tally.get_mut(&a.gender).expect("gender present");
        t.artists += 1;
        t.auctioned += auctioned.contains(a.artist_id.as_str()) as u64;
    }
    for e in &corpus.exhibitions {
        tally.get_mut(&genders[e.artist_id.as_str()]).expect("gender present").exhibitions += 1;
    }
    for s in &corpus.auctions {
        let t = tally.get_mut(&genders[s.artist_id.as_str()]).expect("gender present");
        t.records += 1;
        t.sales += s.normalized_price;
    }

    let ratio = |num: u64, den: u64| (den > 0).then(|| num as f64 / den as f64);
    let metric = |g: Gender, m: Metric| -> Option<f64> {
        let t = tally[&g];
        match m {
            Metric::ArtistPopulation => Some(t.artists as f64),
            Metric::ExhibitionCount => Some(t.exhibitions as f64),
            Metric::AuctionPopulation => Some(t.auctioned as f64),
            Metric::AccessRate => ratio(t.auctioned, t.artists),
            Metric::AuctionRecords => Some(t.records as f64),
            Metric::AverageNormalizedPrice => (t.records > 0).then(|| t.sales / t.records as f64),
            Metric::AuctionsPerAuctionedArtist => ratio(t.records, t.auctioned),
            Metric::TotalNormalizedSales => Some(t.sales),
        }
    };
    let rows = Metric::ALL.iter().map(|&m| MetricRow::new(m, metric(Gender::Man, m), metric(Gender::Woman, m))).collect();
    let all = tally.values().fold((0, 0), |acc, t| (acc.0 + t.auctioned, acc.1 + t.artists));
    DisparityReport { rows, overall_access_rate: ratio(all.0, all.1) }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveFeature {
    CareerLength,
    ExhibitionsPerYear,
}

impl CurveFeature {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::CareerLength => "career_length",
            Self::ExhibitionsPerYear => "exhibitions_per_year",
        }
    }

    fn value(self, f: &CareerFeatures) -> f64 {
        match self {
            Self::CareerLength => f.career_length as f64,
            Self::ExhibitionsPerYear => f.exhibitions_per_year,
        }
    }
}

/// Bin edges per feature; bins are `[edge_i, edge_{i+1})` and the last bin
/// is open-ended.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CurveBinning {
    pub career_length_edges: Vec<f64>,
    pub exhibitions_per_year_edges: Vec<f64>,
    /// Bins with fewer artists are flagged.
    pub min_support: u64,
}

impl Default for CurveBinning {
    fn default() -> Self {
        Self {
            career_length_edges: (1..=30).map(f64::from).collect(),
            exhibitions_per_year_edges: vec![0.0, 0.25, 0.5, 1.0, 2.0, 3.0, 5.0, 8.0, 13.0, 21.0],
            min_support: 30,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub feature: CurveFeature,
    pub bin_low: f64,
    pub bin_high: f64,
    pub gender: Gender,
    pub n: u64,
    pub access_rate: Option<f64>,
    pub low_support: bool,
}

/// Share of artists with auction access per feature bin and gender. Empty
/// bins are emitted with `n = 0` and no rate.
pub fn access_rate_curves(
    features: &[CareerFeatures],
    auctioned: &BTreeSet<&str>,
    binning: &CurveBinning,
) -> Vec<CurvePoint> {
    let mut out = Vec::new();
    for (feature, edges) in [
        (CurveFeature::CareerLength, &binning.career_length_edges),
        (CurveFeature::ExhibitionsPerYear, &binning.exhibitions_per_year_edges),
    ] {
        let mut bounds: Vec<(f64, f64)> = edges.windows(2).map(|w| (w[0], w[1])).collect();
        bounds.extend(edges.last().map(|&e| (e, f64::INFINITY)));
        for (lo, hi) in bounds {
            for gender in Gender::ALL {
                let (mut n, mut hits) = (0u64, 0u64);
                for f in features.iter().filter(|f| f.gender == gender) {
                    let v = feature.value(f);
                    if v >= lo && v < hi {
                        n += 1;
                        hits += auctioned.contains(f.artist_id.as_str()) as u64;
                    }
                }
                out.push(CurvePoint {
                    feature,
                    bin_low: lo,
                    bin_high: hi,
                    gender,
                    n,
                    access_rate: (n > 0).then(|| hits as f64 / n as f64),
                    low_support: n < binning.min_support,
                });
            }
        }
    }
    out
}

pub const CURVES_HEADER: [&str; 7] = ["feature", "bin_low", "bin_high", "gender", "n", "access_rate", "low_support"];

pub fn write_curves(points: &[CurvePoint], path: &Path) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(CURVES_HEADER)?;
    for p in points {
        w.write_record([
            p.feature.as_str().to_string(),
            p.bin_low.to_string(),
            p.bin_high.to_string(),
            p.gender.as_str().to_string(),
            p.n.to_string(),
            p.access_rate.map(|r| r.to_string()).unwrap_or_default(),
            p.low_support.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
