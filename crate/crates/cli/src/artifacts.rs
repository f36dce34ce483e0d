//! Stage directories, JSON envelopes with provenance, file manifests and
//! the output-directory lock.

use std::collections::BTreeMap;
use std::fs::OpenOptions;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::error::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Meta {
    pub config_digest: String,
    pub config: RunConfig,
}

#[derive(Serialize)]
struct Envelope<'a, T> {
    meta: &'a Meta,
    data: &'a T,
}

#[derive(Deserialize)]
struct OwnedEnvelope<T> {
    #[allow(dead_code)]
    meta: serde_json::Value,
    data: T,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    stage: &'a str,
    config_digest: &'a str,
    files: &'a BTreeMap<String, String>,
}

pub fn sha256_file(path: &Path) -> Result<String, CliError> {
    let bytes = std::fs::read(path).map_err(CliError::io(path))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Collects one stage's outputs and writes its manifest on [`finish`](Self::finish).
pub struct StageWriter<'m> {
    pub dir: PathBuf,
    stage: &'static str,
    meta: &'m Meta,
    files: BTreeMap<String, String>,
}

impl<'m> StageWriter<'m> {
    pub fn new(out: &Path, stage: &'static str, meta: &'m Meta) -> Result<Self, CliError> {
        let dir = out.join(stage_dir(stage));
        std::fs::create_dir_all(&dir).map_err(CliError::io(&dir))?;
        Ok(Self { dir, stage, meta, files: BTreeMap::new() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn json<T: Serialize>(&mut self, name: &str, data: &T) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(&Envelope { meta: self.meta, data })? + "\n";
        self.raw(name, text.as_bytes())
    }

    pub fn raw(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.path(name);
        std::fs::write(&path, bytes).map_err(CliError::io(&path))?;
        self.record(name)
    }

    /// Registers a file written directly into the stage directory.
    pub fn record(&mut self, name: &str) -> Result<(), CliError> {
        let digest = sha256_file(&self.path(name))?;
        self.files.insert(name.to_string(), digest);
        Ok(())
    }

    pub fn finish(self) -> Result<(), CliError> {
        let manifest = Manifest { stage: self.stage, config_digest: &self.meta.config_digest, files: &self.files };
        let path = self.dir.join("manifest.json");
        let text = serde_json::to_string_pretty(&manifest)? + "\n";
        std::fs::write(&path, text).map_err(CliError::io(&path))
    }
}

/// Directory a stage writes into.
pub fn stage_dir(stage: &str) -> &'static str {
    match stage {
        "ingest" => "corpus",
        "classify" => "classify",
        "network" => "network",
        "careers" => "careers",
        "auctions" => "auctions",
        "regress" => "regress",
        "report" => "report",
        "simulate" => "world",
        _ => unreachable!("unknown stage {stage}"),
    }
}

/// Path of an upstream artifact, or an error naming the stage that makes it.
pub fn require(out: &Path, stage: &'static str, name: &str) -> Result<PathBuf, CliError> {
    let path = out.join(stage_dir(stage)).join(name);
    if path.exists() {
        Ok(path)
    } else {
        Err(CliError::MissingArtifact { path: path.display().to_string(), stage })
    }
}

pub fn read_json<T: DeserializeOwned>(out: &Path, stage: &'static str, name: &str) -> Result<T, CliError> {
    let path = require(out, stage, name)?;
    let text = std::fs::read_to_string(&path).map_err(CliError::io(&path))?;
    let env: OwnedEnvelope<T> =
        serde_json::from_str(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    Ok(env.data)
}

/// Exclusive claim on an output directory, released on drop.
pub struct OutputLock {
    path: PathBuf,
}

impl OutputLock {
    pub fn acquire(out: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(out).map_err(CliError::io(out))?;
        let path = out.join(".artequity.lock");
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(_) => Ok(Self { path }),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => Err(CliError::Data(format!(
                "{} exists: another run is writing to this directory (delete the file if no run is active)",
                path.display()
            ))),
            Err(e) => Err(CliError::Io { path: path.display().to_string(), source: e }),
        }
    }
}

impl Drop for OutputLock {
    fn drop(&mut self) {
        let _ = std::fs::remove_file(&self.path);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn second_lock_fails_until_first_is_dropped() {
        let dir = tempfile::tempdir().unwrap();
        let first = OutputLock::acquire(dir.path()).unwrap();
        assert!(OutputLock::acquire(dir.path()).is_err());
        drop(first);
        assert!(OutputLock::acquire(dir.path()).is_ok());
    }

    #[test]
    fn missing_artifact_names_stage() {
        let dir = tempfile::tempdir().unwrap();
        let err = require(dir.path(), "careers", "careers.csv").unwrap_err();
        assert!(err.to_string().contains("artequity careers"));
        assert_eq!(err.exit_code(), 2);
    }
}
