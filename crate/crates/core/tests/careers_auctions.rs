use std::collections::BTreeMap;

use artequity_core::auctions::{access_rate_curves, auctioned_artists, disparity_report, CurveBinning, Metric};
use artequity_core::bftest::{classify_corpus, Category, ClassifierConfig, EquityCriterion, GroupBy};
use artequity_core::careers::{career_features, category_baseline, lock_in_matrix, BaselineKind, TransitionMatrix};
use artequity_core::corpus::{apply_career_filters, Artist, CleanCorpus, FilterConfig, Gender};
use artequity_core::exnet::{build_network, prestige, PrestigeConfig};
use artequity_core::synth::{generate, WorldSpec};

fn world(seed: u64, n: usize) -> (CleanCorpus, artequity_core::synth::Truth) {
    let w = generate(&WorldSpec::standard(seed, n)).unwrap();
    (apply_career_filters(&w.corpus, &FilterConfig::default()).unwrap().0, w.truth)
}

#[test]
fn access_curves_track_planted_probabilities() {
    let (corpus, truth) = world(31, 10_000);
    let (net, _) = build_network(&corpus);
    let table = prestige(&net, &PrestigeConfig::default()).unwrap();
    let features = career_features(&corpus, &table);
    let auctioned = auctioned_artists(&corpus);
    let binning = CurveBinning::default();
    let points = access_rate_curves(&features, &auctioned, &binning);
    let mut checked = 0;
    for p in points.iter().filter(|p| !p.low_support) {
        let members: Vec<f64> = features
            .iter()
            .filter(|f| f.gender == p.gender)
            .filter(|f| {
                let v = match p.feature.as_str() {
                    "career_length" => f.career_length as f64,
                    _ => f.exhibitions_per_year,
                };
                v >= p.bin_low && v < p.bin_high
            })
            .map(|f| truth.artists[&f.artist_id].access_probability)
            .collect();
        assert_eq!(members.len() as u64, p.n);
        let mean = members.iter().sum::<f64>() / p.n as f64;
        let var: f64 = members.iter().map(|q| q * (1.0 - q)).sum::<f64>() / (p.n as f64).powi(2);
        let rate = p.access_rate.unwrap();
        assert!((rate - mean).abs() <= 3.0 * var.sqrt() + 1e-12, "{p:?}: expected {mean}");
        checked += 1;
    }
    assert!(checked >= 20, "{checked}");
}

#[test]
fn swapping_genders_inverts_every_ratio() {
    let (corpus, _) = world(32, 3_000);
    let swapped = CleanCorpus::from_parts(
        corpus
            .artists
            .iter()
            .map(|a| Artist {
                gender: match a.gender {
                    Gender::Man => Gender::Woman,
                    Gender::Woman => Gender::Man,
                },
                ..a.clone()
            })
            .collect(),
        corpus.exhibitions.clone(),
        corpus.auctions.clone(),
    );
    let (a, b) = (disparity_report(&corpus), disparity_report(&swapped));
    for m in Metric::ALL {
        let (x, y) = (a.row(m).ratio.unwrap(), b.row(m).ratio.unwrap());
        assert!((x * y - 1.0).abs() < 1e-12, "{m:?}: {x} {y}");
    }
    assert!((a.overall_access_rate.unwrap() - b.overall_access_rate.unwrap()).abs() < 1e-15);
}

#[test]
fn disparity_aggregates_are_consistent() {
    let (corpus, _) = world(33, 3_000);
    let r = disparity_report(&corpus);
    let pop = r.row(Metric::ArtistPopulation);
    let rate = r.row(Metric::AccessRate);
    let (m, w) = (pop.man.unwrap(), pop.woman.unwrap());
    let overall = (m * rate.man.unwrap() + w * rate.woman.unwrap()) / (m + w);
    assert!((overall - r.overall_access_rate.unwrap()).abs() < 1e-12);
    let sales = r.row(Metric::TotalNormalizedSales);
    let total: f64 = corpus.auctions.iter().map(|a| a.normalized_price).sum();
    assert!((sales.man.unwrap() + sales.woman.unwrap() - total).abs() < 1e-9 * total);
}

#[test]
fn lock_in_bins_partition_the_global_matrix() {
    let (corpus, _) = world(34, 5_000);
    let crit = EquityCriterion::neutral(&corpus).unwrap();
    let labels: BTreeMap<String, Category> =
        classify_corpus(&corpus, &crit, GroupBy::Institution, &ClassifierConfig::default()).unwrap().category_map();
    let baseline = category_baseline(&corpus, &labels, BaselineKind::ExhibitionWeighted).unwrap();
    let (net, _) = build_network(&corpus);
    let features = career_features(&corpus, &prestige(&net, &PrestigeConfig::default()).unwrap());
    let lock = lock_in_matrix(&corpus, &labels, &baseline, &features, 5).unwrap();
    assert!(lock.artists_included > 100);
    let mut sum = [[0u64; 3]; 3];
    for m in lock.by_prestige_bin.values() {
        for (acc, row) in sum.iter_mut().zip(&m.counts) {
            for (a, c) in acc.iter_mut().zip(row) {
                *a += c;
            }
        }
    }
    assert_eq!(sum, lock.global.counts);
    let by_bin: u64 = lock.by_prestige_bin.values().map(TransitionMatrix::artists).sum();
    assert_eq!(by_bin as usize, lock.artists_included);
    for row in lock.global.probabilities.iter().flatten() {
        assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }
}
