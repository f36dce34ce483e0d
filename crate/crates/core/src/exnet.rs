//! Institution co-exhibition network, prestige centrality and category
//! assortativity.
//!
//! An edge `A → B` gains one unit of weight every time an artist's next
//! exhibition after one at `A` takes place at `B`.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bftest::Category;
use crate::corpus::CleanCorpus;

#[derive(Debug, Error, PartialEq)]
pub enum NetworkError {
    #[error("network has no nodes")]
    Empty,
    #[error("invalid prestige configuration: {0}")]
    Config(String),
    #[error("power iteration did not converge after {iterations} iterations (last L1 change {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("institution `{0}` has no classification")]
    MissingClassification(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub weight: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoExhibitionNetwork {
    /// Institution ids, sorted; edges refer to positions in this list.
    pub nodes: Vec<String>,
    /// Sorted by (source, target).
    pub edges: Vec<Edge>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildStats {
    pub artists: usize,
    pub exhibitions: usize,
    pub transitions: u64,
    pub skipped_self_pairs: u64,
}

impl CoExhibitionNetwork {
    pub fn total_weight(&self) -> u64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.nodes.binary_search_by(|n| n.as_str().cmp(id)).ok()
    }

    /// Builds a network directly from `(source, target, weight)` id triples.
    pub fn from_weighted_edges<'a, I>(nodes: impl IntoIterator<Item = &'a str>, edges: I) -> Self
    where
        I: IntoIterator<Item = (&'a str, &'a str, u64)>,
    {
        let mut ids: Vec<String> = nodes.into_iter().map(str::to_string).collect();
        let edges: Vec<_> = edges.into_iter().collect();
        ids.extend(edges.iter().flat_map(|(s, t, _)| [s.to_string(), t.to_string()]));
        ids.sort();
        ids.dedup();
        let index: HashMap<&str, usize> = ids.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let mut weights: BTreeMap<(usize, usize), u64> = BTreeMap::new();
        for (s, t, w) in edges {
            if s != t && w > 0 {
                *weights.entry((index[s], index[t])).or_default() += w;
            }
        }
        let edges = weights.into_iter().map(|((source, target), weight)| Edge { source, target, weight }).collect();
        Self { nodes: ids, edges }
    }
}

/// Links consecutive exhibitions of every artist. Every institution that
/// appears in the corpus is a node, including ones without edges.
pub fn build_network(corpus: &CleanCorpus) -> (CoExhibitionNetwork, BuildStats) {
    let mut nodes: Vec<String> = crate::corpus::institution_ids(corpus).into_iter().map(str::to_string).collect();
    nodes.sort();
    let index: HashMap<&str, usize> = nodes.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();

    let mut stats = BuildStats::default();
    let mut weights: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    for events in corpus.exhibitions_by_artist().values() {
        stats.artists += 1;
        stats.exhibitions += events.len();
        for pair in events.windows(2) {
            let (s, t) = (index[pair[0].institution_id.as_str()], index[pair[1].institution_id.as_str()]);
            if s == t {
                stats.skipped_self_pairs += 1;
            } else {
                stats.transitions += 1;
                *weights.entry((s, t)).or_default() += 1;
            }
        }
    }
    let edges: Vec<Edge> =
        weights.into_iter().map(|((source, target), weight)| Edge { source, target, weight }).collect();
    let network = CoExhibitionNetwork { nodes, edges };

    let expected = stats.exhibitions as u64 - stats.artists as u64 - stats.skipped_self_pairs;
    assert_eq!(network.total_weight(), expected, "edge weight conservation");
    (network, stats)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrestigeDirection {
    /// Being moved *to* confers prestige.
    Incoming,
    Outgoing,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PrestigeConfig {
    pub damping: f64,
    pub tolerance: f64,
    pub max_iter: usize,
    pub direction: PrestigeDirection,
}

impl Default for PrestigeConfig {
    fn default() -> Self {
        Self { damping: 0.85, tolerance: 1e-13, max_iter: 10_000, direction: PrestigeDirection::Incoming }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrestigeBin {
    Low,
    Mid,
    High,
}

impl PrestigeBin {
    pub const ALL: [PrestigeBin; 3] = [PrestigeBin::Low, PrestigeBin::Mid, PrestigeBin::High];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Low => "low",
            Self::Mid => "mid",
            Self::High => "high",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|b| b.as_str() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrestigeEntry {
    pub institution_id: String,
    pub score: f64,
    pub bin: PrestigeBin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrestigeTable {
    /// In node order.
    pub entries: Vec<PrestigeEntry>,
    pub iterations: usize,
    pub residual: f64,
}

impl PrestigeTable {
    pub fn scores(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.score).collect()
    }

    pub fn score_map(&self) -> HashMap<&str, f64> {
        self.entries.iter().map(|e| (e.institution_id.as_str(), e.score)).collect()
    }
}

/// Stationary vector of the damped walk on the weighted network, scaled to max 1.
///
/// Each step moves a node's mass along its out-edges in proportion to
/// weight (dangling nodes spread uniformly), keeps a fraction `damping` of
/// it and redistributes the rest uniformly.
pub fn prestige(network: &CoExhibitionNetwork, cfg: &PrestigeConfig) -> Result<PrestigeTable, NetworkError> {
    let n = network.nodes.len();
    if n == 0 {
        return Err(NetworkError::Empty);
    }
    if !(cfg.damping > 0.0 && cfg.damping <= 1.0) {
        return Err(NetworkError::Config(format!("damping {} outside (0, 1]", cfg.damping)));
    }
    if !(cfg.tolerance > 0.0) {
        return Err(NetworkError::Config("tolerance must be positive".into()));
    }

    let oriented: Vec<(usize, usize, f64)> = network
        .edges
        .iter()
        .map(|e| match cfg.direction {
            PrestigeDirection::Incoming => (e.source, e.target, e.weight as f64),
            PrestigeDirection::Outgoing => (e.target, e.source, e.weight as f64),
        })
        .collect();
    let mut out_strength = vec![0.0; n];
    for &(s, _, w) in &oriented {
        out_strength[s] += w;
    }
    let transitions: Vec<(usize, usize, f64)> =
        oriented.iter().map(|&(s, t, w)| (s, t, w / out_strength[s])).collect();

    let nf = n as f64;
    let mut x = vec![1.0 / nf; n];
    let mut next = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for iteration in 1..=cfg.max_iter {
        let dangling: f64 = x.iter().zip(&out_strength).filter(|(_, &s)| s == 0.0).map(|(v, _)| v).sum();
        let base = cfg.damping * dangling / nf + (1.0 - cfg.damping) / nf;
        next.iter_mut().for_each(|v| *v = base);
        for &(s, t, p) in &transitions {
            next[t] += cfg.damping * x[s] * p;
        }
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|v| *v /= total);
        residual = x.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut x, &mut next);
        if residual < cfg.tolerance {
            let max = x.iter().cloned().fold(f64::MIN, f64::max);
            let scores: Vec<f64> = x.iter().map(|v| v / max).collect();
            let bins = percentile_bins(&scores);
            let entries = network
                .nodes
                .iter()
                .zip(scores.iter().zip(bins))
                .map(|(id, (&score, bin))| PrestigeEntry { institution_id: id.clone(), score, bin })
                .collect();
            return Ok(PrestigeTable { entries, iterations: iteration, residual });
        }
    }
    Err(NetworkError::NonConvergence { iterations: cfg.max_iter, residual })
}

/// Scores closer than this are treated as tied when binning.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Low up to the 40th percentile, mid up to the 70th, high above.
///
/// Cutoffs are nearest-rank order statistics; ties with a cutoff go to the
/// lower bin.
pub fn percentile_bins(scores: &[f64]) -> Vec<PrestigeBin> {
    if scores.is_empty() {
        return Vec::new();
    }
    let mut sorted = scores.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let cutoff = |q: f64| sorted[((q * n as f64).ceil() as usize).clamp(1, n) - 1];
    let (q40, q70) = (cutoff(0.4), cutoff(0.7));
    scores
        .iter()
        .map(|&s| {
            if s <= q40 + TIE_TOLERANCE {
                PrestigeBin::Low
            } else if s <= q70 + TIE_TOLERANCE {
                PrestigeBin::Mid
            } else {
                PrestigeBin::High
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssortativitySummary {
    /// Total outgoing edge weight per source category.
    pub out_weight: BTreeMap<Category, u64>,
    /// Per source, share of outgoing weight landing on each target category
    /// (uncategorised included); absent when the source has no outgoing weight.
    pub shares: BTreeMap<Category, Option<BTreeMap<Category, f64>>>,
    /// Same, renormalized over categorisable targets only.
    pub categorised_shares: BTreeMap<Category, Option<BTreeMap<Category, f64>>>,
    /// Each category's share of categorisable institutions; empty if there are none.
    pub baseline: BTreeMap<Category, f64>,
}

impl AssortativitySummary {
    /// Share of a categorisable source's categorised out-weight that stays in its category.
    pub fn self_share(&self, category: Category) -> Option<f64> {
        self.categorised_shares.get(&category)?.as_ref()?.get(&category).copied()
    }
}

/// Weighted category mixing of the network under the given node labels.
pub fn assortativity(
    network: &CoExhibitionNetwork,
    labels: &BTreeMap<String, Category>,
) -> Result<AssortativitySummary, NetworkError> {
    let node_cat: Vec<Category> = network
        .nodes
        .iter()
        .map(|id| labels.get(id).copied().ok_or_else(|| NetworkError::MissingClassification(id.clone())))
        .collect::<Result<_, _>>()?;

    let mut mixing: BTreeMap<Category, BTreeMap<Category, u64>> = BTreeMap::new();
    for e in &network.edges {
        *mixing.entry(node_cat[e.source]).or_default().entry(node_cat[e.target]).or_default() += e.weight;
    }

    let mut out_weight = BTreeMap::new();
    let mut shares = BTreeMap::new();
    let mut categorised_shares = BTreeMap::new();
    for source in Category::ALL {
        let row = mixing.get(&source);
        let total: u64 = row.map(|r| r.values().sum()).unwrap_or(0);
        out_weight.insert(source, total);
        let normalize = |targets: &[Category]| -> Option<BTreeMap<Category, f64>> {
            let row = row?;
            let denom: u64 = targets.iter().map(|t| row.get(t).copied().unwrap_or(0)).sum();
            (denom > 0).then(|| {
                targets.iter().map(|&t| (t, row.get(&t).copied().unwrap_or(0) as f64 / denom as f64)).collect()
            })
        };
        shares.insert(source, normalize(&Category::ALL));
        categorised_shares.insert(source, normalize(&Category::CATEGORISABLE));
    }

    let categorisable = node_cat.iter().filter(|c| c.is_categorised()).count();
    // empty when nothing is categorisable
    let baseline = Category::CATEGORISABLE
        .iter()
        .filter(|_| categorisable > 0)
        .map(|&c| (c, node_cat.iter().filter(|&&x| x == c).count() as f64 / categorisable as f64))
        .collect();

    Ok(AssortativitySummary { out_weight, shares, categorised_shares, baseline })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Artist, ExhibitionEvent, Gender, InstitutionType};
    use chrono::NaiveDate;

    fn show(artist: &str, inst: &str, y: i32, d: u32) -> ExhibitionEvent {
        ExhibitionEvent {
            artist_id: artist.into(),
            institution_id: inst.into(),
            date: NaiveDate::from_ymd_opt(y, 1, d).unwrap(),
            institution_type: InstitutionType::Museum,
            country: "DE".into(),
        }
    }

    fn corpus(shows: Vec<ExhibitionEvent>) -> CleanCorpus {
        let mut ids: Vec<String> = shows.iter().map(|s| s.artist_id.clone()).collect();
        ids.sort();
        ids.dedup();
        let artists = ids
            .into_iter()
            .map(|id| Artist { artist_id: id.clone(), name: id, birth_year: None, gender: Gender::Man })
            .collect();
        CleanCorpus::from_parts(artists, shows, vec![])
    }

    fn weight(net: &CoExhibitionNetwork, s: &str, t: &str) -> u64 {
        let (s, t) = (net.index_of(s).unwrap(), net.index_of(t).unwrap());
        net.edges.iter().find(|e| e.source == s && e.target == t).map_or(0, |e| e.weight)
    }

    #[test]
    fn chain_of_three_shows() {
        let (net, _) = build_network(&corpus(vec![show("a", "X", 2001, 1), show("a", "Y", 2002, 1), show("a", "Z", 2003, 1)]));
        assert_eq!(net.edges.len(), 2);
        assert_eq!(weight(&net, "X", "Y"), 1);
        assert_eq!(weight(&net, "Y", "Z"), 1);
    }

    #[test]
    fn repeated_moves_aggregate() {
        let (net, _) = build_network(&corpus(vec![
            show("a", "X", 2001, 1),
            show("a", "Y", 2002, 1),
            show("b", "X", 2001, 1),
            show("b", "Y", 2002, 1),
        ]));
        assert_eq!(net.edges.len(), 1);
        assert_eq!(weight(&net, "X", "Y"), 2);
    }

    #[test]
    fn consecutive_same_venue_is_skipped() {
        let (net, stats) =
            build_network(&corpus(vec![show("a", "X", 2001, 1), show("a", "X", 2002, 1), show("a", "Y", 2003, 1)]));
        assert_eq!(net.edges.len(), 1);
        assert_eq!(weight(&net, "X", "Y"), 1);
        assert_eq!(stats.skipped_self_pairs, 1);
    }

    #[test]
    fn same_day_ties_follow_institution_id() {
        let (net, _) = build_network(&corpus(vec![show("a", "Q", 2001, 5), show("a", "B", 2001, 5)]));
        assert_eq!(weight(&net, "B", "Q"), 1);
        assert_eq!(weight(&net, "Q", "B"), 0);
    }

    #[test]
    fn single_show_artist_is_an_isolated_node() {
        let (net, stats) = build_network(&corpus(vec![show("a", "X", 2001, 1)]));
        assert_eq!(net.nodes, vec!["X".to_string()]);
        assert!(net.edges.is_empty());
        assert_eq!(stats.transitions, 0);
    }

    fn complete(n: usize) -> CoExhibitionNetwork {
        let names: Vec<String> = (0..n).map(|i| format!("n{i}")).collect();
        let mut edges = vec![];
        for s in &names {
            for t in &names {
                if s != t {
                    edges.push((s.as_str(), t.as_str(), 3));
                }
            }
        }
        CoExhibitionNetwork::from_weighted_edges(names.iter().map(String::as_str), edges)
    }

    #[test]
    fn complete_graph_scores_tie_into_low_bin() {
        let table = prestige(&complete(4), &PrestigeConfig::default()).unwrap();
        for e in &table.entries {
            assert!((e.score - 1.0).abs() < 1e-12);
            assert_eq!(e.bin, PrestigeBin::Low);
        }
    }

    #[test]
    fn star_hub_is_maximal() {
        let spokes: Vec<String> = (0..6).map(|i| format!("s{i}")).collect();
        let net = CoExhibitionNetwork::from_weighted_edges(
            std::iter::empty(),
            spokes.iter().map(|s| (s.as_str(), "hub", 1)),
        );
        let table = prestige(&net, &PrestigeConfig::default()).unwrap();
        let hub = table.entries.iter().find(|e| e.institution_id == "hub").unwrap();
        assert_eq!(hub.score, 1.0);
        assert!(table.entries.iter().filter(|e| e.institution_id != "hub").all(|e| e.score < 1.0));
        assert_eq!(hub.bin, PrestigeBin::High);
    }

    #[test]
    fn outgoing_direction_reverses_star() {
        let net = CoExhibitionNetwork::from_weighted_edges(std::iter::empty(), [("a", "hub", 1), ("b", "hub", 1)]);
        let cfg = PrestigeConfig { direction: PrestigeDirection::Outgoing, ..Default::default() };
        let table = prestige(&net, &cfg).unwrap();
        let hub = table.entries.iter().find(|e| e.institution_id == "hub").unwrap();
        assert!(hub.score < 1.0);
    }

    #[test]
    fn undamped_periodic_walk_fails_with_diagnostics() {
        // c alternates with {a, b}; without teleportation the mass oscillates forever
        let bipartite = CoExhibitionNetwork::from_weighted_edges(
            std::iter::empty(),
            [("a", "c", 3), ("b", "c", 1), ("c", "a", 1), ("c", "b", 1)],
        );
        let cfg = PrestigeConfig { damping: 1.0, max_iter: 200, ..Default::default() };
        match prestige(&bipartite, &cfg) {
            Err(NetworkError::NonConvergence { iterations, residual }) => {
                assert_eq!(iterations, 200);
                assert!(residual > 0.1);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
        assert!(prestige(&bipartite, &PrestigeConfig::default()).is_ok());
    }

    #[test]
    fn bad_config_and_empty_network() {
        let empty = CoExhibitionNetwork { nodes: vec![], edges: vec![] };
        assert_eq!(prestige(&empty, &PrestigeConfig::default()), Err(NetworkError::Empty));
        let cfg = PrestigeConfig { damping: 0.0, ..Default::default() };
        assert!(matches!(prestige(&complete(3), &cfg), Err(NetworkError::Config(_))));
    }

    #[test]
    fn bins_on_distinct_scores() {
        let scores: Vec<f64> = (1..=10).map(|i| i as f64).collect();
        let bins = percentile_bins(&scores);
        let count = |b| bins.iter().filter(|&&x| x == b).count();
        assert_eq!((count(PrestigeBin::Low), count(PrestigeBin::Mid), count(PrestigeBin::High)), (4, 3, 3));
    }

    #[test]
    fn only_man_over_edges() {
        let net = CoExhibitionNetwork::from_weighted_edges(std::iter::empty(), [("a", "b", 2), ("b", "a", 5)]);
        let labels: BTreeMap<String, Category> =
            [("a".to_string(), Category::ManOver), ("b".to_string(), Category::ManOver)].into();
        let s = assortativity(&net, &labels).unwrap();
        assert_eq!(s.self_share(Category::ManOver), Some(1.0));
        assert_eq!(s.shares[&Category::WomanOver], None);
        assert_eq!(s.baseline[&Category::ManOver], 1.0);
    }

    #[test]
    fn shares_sum_to_one_and_uncategorised_is_its_own_stratum() {
        let net = CoExhibitionNetwork::from_weighted_edges(
            std::iter::empty(),
            [("a", "b", 2), ("a", "c", 1), ("a", "d", 1), ("c", "a", 4)],
        );
        let labels: BTreeMap<String, Category> = [
            ("a".to_string(), Category::ManOver),
            ("b".to_string(), Category::ManOver),
            ("c".to_string(), Category::WomanOver),
            ("d".to_string(), Category::Uncategorised),
        ]
        .into();
        let s = assortativity(&net, &labels).unwrap();
        let row = s.shares[&Category::ManOver].as_ref().unwrap();
        assert!((row.values().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(row[&Category::Uncategorised], 0.25);
        assert!((s.self_share(Category::ManOver).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((s.baseline.values().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((s.baseline[&Category::ManOver] - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn unlabeled_node_is_an_error() {
        let net = CoExhibitionNetwork::from_weighted_edges(std::iter::empty(), [("a", "b", 1)]);
        let labels: BTreeMap<String, Category> = [("a".to_string(), Category::ManOver)].into();
        assert_eq!(assortativity(&net, &labels), Err(NetworkError::MissingClassification("b".into())));
    }
}
