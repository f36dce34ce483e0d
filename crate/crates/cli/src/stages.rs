//! One function per subcommand. Each reads upstream artifacts from the
//! output directory and writes its own stage directory.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use artequity_core::auctions::{access_rate_curves, auctioned_artists, disparity_report, write_curves, DisparityReport};
use artequity_core::bftest::{
    classification_rows, classify_corpus, decision_boundaries, parse_category_rows, BoundaryPoint, Category,
    ClassificationSummary, CriterionKind, EquityCriterion, GroupBy, CLASSIFICATION_HEADER,
};
use artequity_core::careers::{
    career_features, category_baseline, co_exhibition_profiles, lock_in_matrix, read_careers, write_careers,
    CareerRow, CategoryBaseline, CoGender, LockIn,
};
use artequity_core::corpus::{self, CleanCorpus, FileCounts, FilterReport, Gender, Reject};
use artequity_core::exnet::{
    assortativity, build_network, prestige, AssortativitySummary, BuildStats, PrestigeBin, PrestigeEntry,
    PrestigeTable,
};
use artequity_core::regress::{self, compare, encode, predict, ComparisonRow, ModelId, Observation, RegressionFit};
use artequity_core::synth::{generate, Truth};
use serde::{Deserialize, Serialize};

use crate::artifacts::{read_json, require, stage_dir, Meta, StageWriter};
use crate::config::RunConfig;
use crate::error::CliError;

pub struct Ctx<'a> {
    pub out: &'a Path,
    pub cfg: &'a RunConfig,
    pub meta: Meta,
}

fn write_csv<const N: usize>(path: &Path, header: [&str; N], rows: &[[String; N]]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush().map_err(CliError::io(path))
}

fn note(stage: &str, msg: impl AsRef<str>) {
    eprintln!("{stage}: {}", msg.as_ref());
}

// ---------------------------------------------------------------------------
// ingest

#[derive(Debug, Serialize, Deserialize)]
pub struct IngestSummary {
    pub inputs: [String; 3],
    pub raw_rows: FileCounts,
    pub rejects: Vec<Reject>,
    pub filters: FilterReport,
    pub retained: FileCounts,
    pub women_fraction: f64,
    pub warnings: Vec<String>,
}

fn input_paths(ctx: &Ctx) -> Result<[PathBuf; 3], CliError> {
    match &ctx.cfg.inputs {
        Some(p) => Ok([p.artists.clone(), p.exhibitions.clone(), p.auctions.clone()]),
        None => Ok([
            require(ctx.out, "simulate", "artists.csv")?,
            require(ctx.out, "simulate", "exhibitions.csv")?,
            require(ctx.out, "simulate", "auctions.csv")?,
        ]),
    }
}

pub fn ingest(ctx: &Ctx) -> Result<(), CliError> {
    let [a, e, u] = input_paths(ctx)?;
    let raw = corpus::ingest(&a, &e, &u)?;
    let (clean, filters) = corpus::apply_career_filters(&raw, &ctx.cfg.filters)?;
    let mut w = StageWriter::new(ctx.out, "ingest", &ctx.meta)?;
    corpus::write_clean(&clean, &w.dir)?;
    for f in ["artists.csv", "exhibitions.csv", "auctions.csv"] {
        w.record(f)?;
    }
    w.raw("rejects.json", (serde_json::to_string_pretty(&raw.rejects)? + "\n").as_bytes())?;
    let retained =
        FileCounts { artists: clean.artists.len(), exhibitions: clean.exhibitions.len(), auctions: clean.auctions.len() };
    note(
        "ingest",
        format!(
            "{} artists, {} exhibitions, {} auction records retained ({} rows rejected)",
            retained.artists,
            retained.exhibitions,
            retained.auctions,
            raw.rejects.len()
        ),
    );
    w.json(
        "ingest.json",
        &IngestSummary {
            // paths inside the output directory are stored relative to it so bundles compare across locations
            inputs: [a, e, u].map(|p| p.strip_prefix(ctx.out).unwrap_or(&p).display().to_string()),
            raw_rows: raw.raw_rows,
            rejects: raw.rejects,
            filters,
            retained,
            women_fraction: clean.women_fraction,
            warnings: clean.warnings,
        },
    )?;
    w.finish()
}

fn load_corpus(out: &Path) -> Result<CleanCorpus, CliError> {
    require(out, "ingest", "artists.csv")?;
    Ok(corpus::read_clean(&out.join(stage_dir("ingest")))?)
}

// ---------------------------------------------------------------------------
// classify

#[derive(Debug, Serialize, Deserialize)]
pub struct ClassifyReport {
    pub criterion: EquityCriterion,
    pub institutions: ClassificationSummary,
    pub countries: Option<ClassificationSummary>,
    pub boundaries: Vec<BoundaryPoint>,
}

fn institutions_file(kind: CriterionKind) -> String {
    format!("institutions_{}.csv", kind.tag())
}

pub fn classify(ctx: &Ctx) -> Result<(), CliError> {
    let corpus = load_corpus(ctx.out)?;
    let classifier = ctx.cfg.classify.classifier();
    let mut w = StageWriter::new(ctx.out, "classify", &ctx.meta)?;
    for kind in ctx.cfg.criterion.kinds() {
        let criterion = EquityCriterion::for_kind(kind, &corpus)?;
        let inst = classify_corpus(&corpus, &criterion, GroupBy::Institution, &classifier)?;
        let name = institutions_file(kind);
        write_csv(&w.path(&name), CLASSIFICATION_HEADER, &classification_rows(&inst.results))?;
        w.record(&name)?;

        let countries = if ctx.cfg.classify.countries {
            let c = classify_corpus(&corpus, &criterion, GroupBy::Country, &classifier)?;
            let name = format!("countries_{}.csv", kind.tag());
            write_csv(&w.path(&name), CLASSIFICATION_HEADER, &classification_rows(&c.results))?;
            w.record(&name)?;
            Some(c.summary)
        } else {
            None
        };
        let boundaries = decision_boundaries(&criterion, &ctx.cfg.classify.boundary_ns, &classifier)?;
        let rows: Vec<[String; 4]> = boundaries
            .iter()
            .map(|b| [b.criterion.as_str().into(), b.n.to_string(), b.edge.as_str().into(), b.k.to_string()])
            .collect();
        let name = format!("boundaries_{}.csv", kind.tag());
        write_csv(&w.path(&name), ["criterion", "n", "edge", "k"], &rows)?;
        w.record(&name)?;
        let counts = &inst.summary.counts;
        note(
            "classify",
            format!(
                "{} (p0 = {}): {} man_over, {} woman_over, {} null_consistent, {} uncategorised",
                kind.tag(),
                criterion.p0,
                counts[&Category::ManOver],
                counts[&Category::WomanOver],
                counts[&Category::NullConsistent],
                counts[&Category::Uncategorised]
            ),
        );
        w.json(
            &format!("summary_{}.json", kind.tag()),
            &ClassifyReport { criterion, institutions: inst.summary, countries, boundaries },
        )?;
    }
    w.finish()
}

fn load_labels(out: &Path, kind: CriterionKind) -> Result<BTreeMap<String, Category>, CliError> {
    let path = require(out, "classify", &institutions_file(kind))?;
    let file = std::fs::File::open(&path).map_err(CliError::io(&path))?;
    parse_category_rows(file).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

// ---------------------------------------------------------------------------
// network

#[derive(Debug, Serialize, Deserialize)]
pub struct NetworkReport {
    pub nodes: usize,
    pub edges: usize,
    pub total_weight: u64,
    pub build: BuildStats,
    pub prestige_iterations: usize,
    pub prestige_residual: f64,
    pub bin_counts: BTreeMap<PrestigeBin, usize>,
    pub assortativity: BTreeMap<CriterionKind, AssortativitySummary>,
}

const NODES_HEADER: [&str; 7] = [
    "institution_id",
    "category_neutral",
    "category_balanced",
    "prestige_score",
    "prestige_bin",
    "in_weight",
    "out_weight",
];
const EDGES_HEADER: [&str; 3] = ["source", "target", "weight"];

pub fn network(ctx: &Ctx) -> Result<(), CliError> {
    let corpus = load_corpus(ctx.out)?;
    let labels: BTreeMap<CriterionKind, _> =
        ctx.cfg.criterion.kinds().into_iter().map(|k| Ok((k, load_labels(ctx.out, k)?))).collect::<Result<_, CliError>>()?;
    let (net, build) = build_network(&corpus);
    let table = prestige(&net, &ctx.cfg.network)?;

    let mut in_w = vec![0u64; net.nodes.len()];
    let mut out_w = vec![0u64; net.nodes.len()];
    for e in &net.edges {
        out_w[e.source] += e.weight;
        in_w[e.target] += e.weight;
    }
    let mut w = StageWriter::new(ctx.out, "network", &ctx.meta)?;
    let category = |kind: CriterionKind, id: &str| {
        labels.get(&kind).and_then(|l| l.get(id)).map(|c| c.as_str().to_string()).unwrap_or_default()
    };
    let node_rows: Vec<[String; 7]> = table
        .entries
        .iter()
        .enumerate()
        .map(|(i, e)| {
            [
                e.institution_id.clone(),
                category(CriterionKind::GenderNeutral, &e.institution_id),
                category(CriterionKind::GenderBalanced, &e.institution_id),
                e.score.to_string(),
                e.bin.as_str().into(),
                in_w[i].to_string(),
                out_w[i].to_string(),
            ]
        })
        .collect();
    write_csv(&w.path("nodes.csv"), NODES_HEADER, &node_rows)?;
    w.record("nodes.csv")?;
    let edge_rows: Vec<[String; 3]> = net
        .edges
        .iter()
        .map(|e| [net.nodes[e.source].clone(), net.nodes[e.target].clone(), e.weight.to_string()])
        .collect();
    write_csv(&w.path("edges.csv"), EDGES_HEADER, &edge_rows)?;
    w.record("edges.csv")?;

    let mut assort = BTreeMap::new();
    for (kind, l) in &labels {
        assort.insert(*kind, assortativity(&net, l)?);
    }
    let mut bin_counts: BTreeMap<PrestigeBin, usize> = PrestigeBin::ALL.iter().map(|&b| (b, 0)).collect();
    for e in &table.entries {
        *bin_counts.get_mut(&e.bin).expect("bin present") += 1;
    }
    note(
        "network",
        format!(
            "{} institutions, {} edges (total weight {}), prestige converged in {} iterations",
            net.nodes.len(),
            net.edges.len(),
            net.total_weight(),
            table.iterations
        ),
    );
    w.json(
        "network.json",
        &NetworkReport {
            nodes: net.nodes.len(),
            edges: net.edges.len(),
            total_weight: net.total_weight(),
            build,
            prestige_iterations: table.iterations,
            prestige_residual: table.residual,
            bin_counts,
            assortativity: assort,
        },
    )?;
    w.finish()
}

fn load_prestige(out: &Path) -> Result<PrestigeTable, CliError> {
    let path = require(out, "network", "nodes.csv")?;
    let mut rdr = csv::Reader::from_path(&path)?;
    let mut entries = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let bad = || CliError::Data(format!("{}: malformed row for `{}`", path.display(), &rec[0]));
        entries.push(PrestigeEntry {
            institution_id: rec[0].to_string(),
            score: rec[3].parse().map_err(|_| bad())?,
            bin: PrestigeBin::parse(&rec[4]).ok_or_else(bad)?,
        });
    }
    Ok(PrestigeTable { entries, iterations: 0, residual: 0.0 })
}

// ---------------------------------------------------------------------------
// careers

#[derive(Debug, Serialize, Deserialize)]
pub struct CareersReport {
    pub criterion: CriterionKind,
    pub min_exhibitions: usize,
    pub baseline: CategoryBaseline,
    pub label_counts: BTreeMap<Gender, BTreeMap<CoGender, usize>>,
    pub lock_in: LockIn,
}

const PROFILE_HEADER: [&str; 8] = [
    "artist_id",
    "exhibitions",
    "categorised_exhibitions",
    "rho_man_over",
    "rho_null_consistent",
    "rho_woman_over",
    "co_gender",
    "reasons",
];

pub fn careers(ctx: &Ctx) -> Result<(), CliError> {
    let corpus = load_corpus(ctx.out)?;
    let table = load_prestige(ctx.out)?;
    let settings = &ctx.cfg.careers;
    let features = career_features(&corpus, &table);
    let genders = corpus.gender_of();
    let mut labels_by_artist: BTreeMap<String, BTreeMap<CriterionKind, CoGender>> = BTreeMap::new();
    let mut w = StageWriter::new(ctx.out, "careers", &ctx.meta)?;
    for kind in ctx.cfg.criterion.kinds() {
        let labels = load_labels(ctx.out, kind)?;
        let baseline = category_baseline(&corpus, &labels, settings.baseline)?;
        let profiles = co_exhibition_profiles(&corpus, &labels, &baseline, settings.min_exhibitions)?;
        let lock_in = lock_in_matrix(&corpus, &labels, &baseline, &features, settings.lockin_window)?;

        let mut label_counts: BTreeMap<Gender, BTreeMap<CoGender, usize>> = BTreeMap::new();
        let rho = |p: &artequity_core::careers::CoExhibitionProfile, c| p.rho.get(&c).map(|v| v.to_string()).unwrap_or_default();
        let rows: Vec<[String; 8]> = profiles
            .iter()
            .map(|p| {
                *label_counts.entry(genders[p.artist_id.as_str()]).or_default().entry(p.co_gender).or_default() += 1;
                labels_by_artist.entry(p.artist_id.clone()).or_default().insert(kind, p.co_gender);
                [
                    p.artist_id.clone(),
                    p.exhibitions.to_string(),
                    p.categorised_exhibitions.to_string(),
                    rho(p, Category::ManOver),
                    rho(p, Category::NullConsistent),
                    rho(p, Category::WomanOver),
                    p.co_gender.as_str().to_string(),
                    p.reasons.join("; "),
                ]
            })
            .collect();
        let name = format!("coexhibition_{}.csv", kind.tag());
        write_csv(&w.path(&name), PROFILE_HEADER, &rows)?;
        w.record(&name)?;
        note(
            "careers",
            format!(
                "{}: {} artists labelled, lock-in over {} artists",
                kind.tag(),
                profiles.iter().filter(|p| p.co_gender != CoGender::Unassigned).count(),
                lock_in.artists_included
            ),
        );
        w.json(
            &format!("lockin_{}.json", kind.tag()),
            &CareersReport { criterion: kind, min_exhibitions: settings.min_exhibitions, baseline, label_counts, lock_in },
        )?;
    }
    let rows: Vec<CareerRow> = features
        .into_iter()
        .map(|f| {
            let co_gender = labels_by_artist.remove(&f.artist_id).unwrap_or_default();
            CareerRow { features: f, co_gender }
        })
        .collect();
    write_careers(&rows, &w.path("careers.csv"))?;
    w.record("careers.csv")?;
    w.finish()
}

fn load_careers(out: &Path) -> Result<Vec<CareerRow>, CliError> {
    Ok(read_careers(&require(out, "careers", "careers.csv")?)?)
}

// ---------------------------------------------------------------------------
// auctions

pub fn auctions(ctx: &Ctx) -> Result<(), CliError> {
    let corpus = load_corpus(ctx.out)?;
    let rows = load_careers(ctx.out)?;
    let features: Vec<_> = rows.into_iter().map(|r| r.features).collect();
    let report = disparity_report(&corpus);
    let curves = access_rate_curves(&features, &auctioned_artists(&corpus), &ctx.cfg.auctions);
    let mut w = StageWriter::new(ctx.out, "auctions", &ctx.meta)?;
    write_curves(&curves, &w.path("curves.csv"))?;
    w.record("curves.csv")?;
    if let Some(r) = report.rows.iter().find(|r| r.metric == artequity_core::auctions::Metric::AccessRate) {
        note("auctions", format!("access rate man {:?}, woman {:?}", r.man, r.woman));
    }
    w.json("disparity.json", &report)?;
    w.finish()
}

// ---------------------------------------------------------------------------
// regress

#[derive(Debug, Serialize, Deserialize)]
pub struct ModelReport {
    pub model: ModelId,
    pub warnings: Vec<String>,
    pub fit: RegressionFit,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PredictionRow {
    pub gender: Gender,
    pub co_gender: CoGender,
    pub exhibitions_per_year: f64,
    pub career_length: f64,
    pub probability: f64,
    pub extrapolated: bool,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RegressReport {
    pub criterion: CriterionKind,
    pub n: usize,
    pub excluded: BTreeMap<String, usize>,
    pub models: Vec<ModelReport>,
    pub comparison: Vec<ComparisonRow>,
    /// Model 4 at the sample medians of the numeric features.
    pub predictions: Vec<PredictionRow>,
}

fn lower_median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[(v.len() - 1) / 2]
}

pub fn regress(ctx: &Ctx) -> Result<(), CliError> {
    let kind = ctx.cfg.regress_criterion();
    let rows = load_careers(ctx.out)?;
    let corpus = load_corpus(ctx.out)?;
    let auctioned: BTreeSet<&str> = auctioned_artists(&corpus);
    let observations = rows
        .iter()
        .map(|r| {
            let co_gender = *r.co_gender.get(&kind).ok_or_else(|| {
                CliError::Data(format!(
                    "careers.csv has no {} co-exhibition labels; rerun `artequity careers` with that criterion",
                    kind.tag()
                ))
            })?;
            Ok(Observation {
                artist_id: r.features.artist_id.clone(),
                auctioned: auctioned.contains(r.features.artist_id.as_str()),
                exhibitions_per_year: r.features.exhibitions_per_year,
                career_length: r.features.career_length as f64,
                gender: r.features.gender,
                co_gender,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let mut models = Vec::new();
    let mut excluded = BTreeMap::new();
    let mut n = 0;
    let mut sample: Vec<&Observation> = Vec::new();
    for model in ModelId::ALL {
        let design = encode(&observations, model)?;
        if model == ModelId::M1 {
            n = design.n();
            for (_, reason) in &design.excluded {
                *excluded.entry(reason.clone()).or_insert(0) += 1;
            }
            let kept: BTreeSet<&str> = design.artist_ids.iter().map(String::as_str).collect();
            sample = observations.iter().filter(|o| kept.contains(o.artist_id.as_str())).collect();
        }
        let fit = regress::fit(&design, &ctx.cfg.regress.fit)
            .map_err(|e| CliError::Numerical(format!("{model}: {}", CliError::from(e))))?;
        models.push(ModelReport { model, warnings: design.warnings, fit });
    }
    let fits: Vec<&RegressionFit> = models.iter().map(|m| &m.fit).collect();
    let comparison = compare(&fits)?;

    let epy = lower_median(sample.iter().map(|o| o.exhibitions_per_year).collect());
    let cl = lower_median(sample.iter().map(|o| o.career_length).collect());
    let m4 = &models[3].fit;
    let mut predictions = Vec::new();
    for gender in Gender::ALL {
        for co_gender in CoGender::ASSIGNED {
            let p = predict(
                m4,
                &Observation {
                    artist_id: String::new(),
                    auctioned: false,
                    exhibitions_per_year: epy,
                    career_length: cl,
                    gender,
                    co_gender,
                },
            );
            predictions.push(PredictionRow {
                gender,
                co_gender,
                exhibitions_per_year: epy,
                career_length: cl,
                probability: p.probability,
                extrapolated: p.extrapolated,
            });
        }
    }
    note(
        "regress",
        format!("{} artists; BIC {}", n, comparison.iter().map(|c| format!("{:.2}", c.bic)).collect::<Vec<_>>().join(" / ")),
    );
    let mut w = StageWriter::new(ctx.out, "regress", &ctx.meta)?;
    w.json("fit.json", &RegressReport { criterion: kind, n, excluded, models, comparison, predictions })?;
    w.finish()
}

// ---------------------------------------------------------------------------
// simulate

pub fn simulate(ctx: &Ctx) -> Result<(), CliError> {
    let spec = ctx.cfg.world_spec();
    let world = generate(&spec)?;
    let mut w = StageWriter::new(ctx.out, "simulate", &ctx.meta)?;
    corpus::write_raw(&world.corpus, &w.dir)?;
    for f in ["artists.csv", "exhibitions.csv", "auctions.csv"] {
        w.record(f)?;
    }
    w.json::<Truth>("truth.json", &world.truth)?;
    w.raw("worldspec.json", (serde_json::to_string_pretty(&spec)? + "\n").as_bytes())?;
    note(
        "simulate",
        format!(
            "{} artists, {} institutions, {} exhibitions, {} auction records",
            world.corpus.artists.len(),
            world.truth.institutions.len(),
            world.corpus.exhibitions.len(),
            world.corpus.auctions.len()
        ),
    );
    w.finish()
}

// ---------------------------------------------------------------------------
// loaders for the report

#[derive(Serialize)]
pub struct Bundle {
    pub ingest: IngestSummary,
    pub classify: Vec<ClassifyReport>,
    pub network: NetworkReport,
    pub careers: Vec<CareersReport>,
    pub disparity: DisparityReport,
    pub regress: RegressReport,
}

pub fn load_bundle(ctx: &Ctx) -> Result<Bundle, CliError> {
    let kinds = ctx.cfg.criterion.kinds();
    Ok(Bundle {
        ingest: read_json(ctx.out, "ingest", "ingest.json")?,
        classify: kinds
            .iter()
            .map(|k| read_json(ctx.out, "classify", &format!("summary_{}.json", k.tag())))
            .collect::<Result<_, _>>()?,
        network: read_json(ctx.out, "network", "network.json")?,
        careers: kinds
            .iter()
            .map(|k| read_json(ctx.out, "careers", &format!("lockin_{}.json", k.tag())))
            .collect::<Result<_, _>>()?,
        disparity: read_json(ctx.out, "auctions", "disparity.json")?,
        regress: read_json(ctx.out, "regress", "fit.json")?,
    })
}
