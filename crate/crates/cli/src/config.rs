//! Run configuration: one JSON document holding every module parameter.

use std::path::{Path, PathBuf};

use artequity_core::auctions::CurveBinning;
use artequity_core::bftest::{BetaPrior, ClassifierConfig, CriterionKind};
use artequity_core::careers::BaselineKind;
use artequity_core::corpus::FilterConfig;
use artequity_core::exnet::PrestigeConfig;
use artequity_core::regress::FitConfig;
use artequity_core::synth::WorldSpec;
use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "snake_case")]
pub enum CriterionSelection {
    Neutral,
    Balanced,
    #[default]
    Both,
}

impl CriterionSelection {
    pub fn kinds(self) -> Vec<CriterionKind> {
        match self {
            Self::Neutral => vec![CriterionKind::GenderNeutral],
            Self::Balanced => vec![CriterionKind::GenderBalanced],
            Self::Both => vec![CriterionKind::GenderNeutral, CriterionKind::GenderBalanced],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputPaths {
    pub artists: PathBuf,
    pub exhibitions: PathBuf,
    pub auctions: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifySettings {
    pub prior: BetaPrior,
    pub evidence_threshold: f64,
    /// Also classify countries (report only; downstream stages use institutions).
    pub countries: bool,
    /// Exhibition counts at which decision boundaries are tabulated.
    pub boundary_ns: Vec<u64>,
}

impl Default for ClassifySettings {
    fn default() -> Self {
        let c = ClassifierConfig::default();
        Self {
            prior: c.prior,
            evidence_threshold: c.evidence_threshold,
            countries: true,
            boundary_ns: vec![10, 20, 50, 100, 200, 500, 1000, 2000, 5000],
        }
    }
}

impl ClassifySettings {
    pub fn classifier(&self) -> ClassifierConfig {
        ClassifierConfig { prior: self.prior, evidence_threshold: self.evidence_threshold }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CareerSettings {
    pub min_exhibitions: usize,
    pub baseline: BaselineKind,
    pub lockin_window: usize,
}

impl Default for CareerSettings {
    fn default() -> Self {
        Self { min_exhibitions: 10, baseline: BaselineKind::ExhibitionWeighted, lockin_window: 5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct RegressSettings {
    pub fit: FitConfig,
    /// Criterion whose co-exhibition labels enter the models; defaults to
    /// gender-neutral when it is selected.
    pub criterion: Option<CriterionKind>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateSettings {
    pub n_artists: usize,
    /// Full world description; when absent a standard world of `n_artists` is used.
    pub world: Option<WorldSpec>,
}

impl Default for SimulateSettings {
    fn default() -> Self {
        Self { n_artists: 10_000, world: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Corpus files; defaults to the simulated world inside the output directory.
    pub inputs: Option<InputPaths>,
    pub criterion: CriterionSelection,
    pub seed: u64,
    pub filters: FilterConfig,
    pub classify: ClassifySettings,
    pub network: PrestigeConfig,
    pub careers: CareerSettings,
    pub auctions: CurveBinning,
    pub regress: RegressSettings,
    pub simulate: SimulateSettings,
}

/// Command-line values that override the file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub criterion: Option<CriterionSelection>,
    pub seed: Option<u64>,
}

impl RunConfig {
    /// Loads the file (or defaults), applies overrides and validates.
    pub fn load(path: Option<&Path>, overrides: &Overrides) -> Result<Self, CliError> {
        let raw: serde_json::Value = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
                serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
            }
            None => serde_json::json!({}),
        };
        let mut cfg: RunConfig =
            serde_json::from_value(raw.clone()).map_err(|e| CliError::Config(format!("invalid config: {e}")))?;

        if let Some(seed) = overrides.seed {
            if raw.get("seed").is_some() && cfg.seed != seed {
                return Err(CliError::Config(format!("--seed {seed} conflicts with config seed {}", cfg.seed)));
            }
            cfg.seed = seed;
        }
        if let Some(sel) = overrides.criterion {
            if raw.get("criterion").is_some() && cfg.criterion != sel {
                return Err(CliError::Config(format!(
                    "--criterion {:?} conflicts with config criterion {:?}",
                    sel, cfg.criterion
                )));
            }
            cfg.criterion = sel;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        self.filters.validate().map_err(|e| CliError::Config(e.to_string()))?;
        let c = &self.classify;
        if !(c.prior.a > 0.0 && c.prior.b > 0.0) {
            return bad(format!("prior parameters must be positive, got ({}, {})", c.prior.a, c.prior.b));
        }
        if !(c.evidence_threshold > 1.0) {
            return bad(format!("evidence_threshold must exceed 1, got {}", c.evidence_threshold));
        }
        let n = &self.network;
        if !(n.damping > 0.0 && n.damping <= 1.0) || !(n.tolerance > 0.0) || n.max_iter == 0 {
            return bad("network needs damping in (0, 1], tolerance > 0 and max_iter > 0".into());
        }
        if self.careers.lockin_window == 0 {
            return bad("careers.lockin_window must be positive".into());
        }
        for (name, edges) in [
            ("career_length_edges", &self.auctions.career_length_edges),
            ("exhibitions_per_year_edges", &self.auctions.exhibitions_per_year_edges),
        ] {
            if edges.is_empty() || edges.windows(2).any(|w| !(w[0] < w[1])) || edges.iter().any(|e| !e.is_finite()) {
                return bad(format!("auctions.{name} must be finite and strictly increasing"));
            }
        }
        let f = &self.regress.fit;
        if !(f.tolerance > 0.0) || f.max_iter == 0 || !(f.max_coefficient_norm > 0.0) {
            return bad("regress.fit needs tolerance > 0, max_iter > 0 and max_coefficient_norm > 0".into());
        }
        if let Some(k) = self.regress.criterion {
            if !self.criterion.kinds().contains(&k) {
                return bad(format!("regress.criterion {} is not among the selected criteria", k.tag()));
            }
        }
        if self.simulate.n_artists == 0 {
            return bad("simulate.n_artists must be positive".into());
        }
        if let Some(w) = &self.simulate.world {
            if w.seed != self.seed {
                return bad(format!("simulate.world.seed {} conflicts with run seed {}", w.seed, self.seed));
            }
            w.validate().map_err(|e| CliError::Config(e.to_string()))?;
        }
        Ok(())
    }

    pub fn regress_criterion(&self) -> CriterionKind {
        self.regress.criterion.unwrap_or(self.criterion.kinds()[0])
    }

    pub fn world_spec(&self) -> WorldSpec {
        self.simulate.world.clone().unwrap_or_else(|| WorldSpec::standard(self.seed, self.simulate.n_artists))
    }

    /// SHA-256 of the canonical JSON serialization.
    pub fn digest(&self) -> String {
        let text = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(text: &str) -> tempfile::NamedTempFile {
        let f = tempfile::NamedTempFile::new().unwrap();
        std::fs::write(f.path(), text).unwrap();
        f
    }

    #[test]
    fn empty_config_uses_defaults() {
        let f = write("{}");
        let cfg = RunConfig::load(Some(f.path()), &Overrides::default()).unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert_eq!(cfg.careers.min_exhibitions, 10);
    }

    #[test]
    fn partial_sections_fill_in() {
        let f = write(r#"{"network": {"damping": 0.9}, "classify": {"evidence_threshold": 10}}"#);
        let cfg = RunConfig::load(Some(f.path()), &Overrides::default()).unwrap();
        assert_eq!(cfg.network.damping, 0.9);
        assert_eq!(cfg.network.max_iter, PrestigeConfig::default().max_iter);
        assert_eq!(cfg.classify.evidence_threshold, 10.0);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let f = write(r#"{"netwrok": {}}"#);
        assert!(matches!(RunConfig::load(Some(f.path()), &Overrides::default()), Err(CliError::Config(_))));
    }

    #[test]
    fn conflicting_seed_is_an_error() {
        let f = write(r#"{"seed": 4}"#);
        let o = Overrides { seed: Some(5), ..Default::default() };
        assert!(matches!(RunConfig::load(Some(f.path()), &o), Err(CliError::Config(_))));
        let o = Overrides { seed: Some(4), ..Default::default() };
        assert_eq!(RunConfig::load(Some(f.path()), &o).unwrap().seed, 4);
    }

    #[test]
    fn regress_criterion_must_be_selected() {
        let f = write(r#"{"criterion": "balanced", "regress": {"criterion": "gender_neutral"}}"#);
        assert!(RunConfig::load(Some(f.path()), &Overrides::default()).is_err());
    }

    #[test]
    fn digest_tracks_content() {
        let a = RunConfig::default();
        let mut b = RunConfig::default();
        assert_eq!(a.digest(), b.digest());
        b.seed = 1;
        assert_ne!(a.digest(), b.digest());
    }
}
