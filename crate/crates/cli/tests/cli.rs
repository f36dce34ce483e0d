use std::path::Path;
use std::process::{Command, Output};

fn artequity(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_artequity")).args(args).arg("--out").arg(out).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn small_config(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("run.json");
    std::fs::write(&path, r#"{"seed": 3, "simulate": {"n_artists": 1500}}"#).unwrap();
    path
}

#[test]
fn regress_without_careers_names_the_missing_stage() {
    let dir = tempfile::tempdir().unwrap();
    let o = artequity(dir.path(), &["regress"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("artequity careers"), "{}", stderr(&o));
}

#[test]
fn ingest_without_inputs_points_at_simulate() {
    let dir = tempfile::tempdir().unwrap();
    let o = artequity(dir.path(), &["ingest"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("artequity simulate"));
}

#[test]
fn usage_errors_exit_one_and_help_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(artequity(dir.path(), &["frobnicate"]).status.code(), Some(1));
    assert_eq!(artequity(dir.path(), &["classify", "--criterion", "fair"]).status.code(), Some(1));
    let help = artequity(dir.path(), &["--help"]);
    assert_eq!(help.status.code(), Some(0));
    let text = String::from_utf8_lossy(&help.stdout);
    for sub in ["ingest", "classify", "network", "careers", "auctions", "regress", "simulate", "report", "all"] {
        assert!(text.contains(sub), "help lacks {sub}");
    }
    assert!(text.contains("default"));
}

#[test]
fn config_conflicts_fail_before_any_work() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let out = dir.path().join("out");
    let o = artequity(&out, &["simulate", "--config", cfg.to_str().unwrap(), "--seed", "4"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!out.join("world").exists());

    std::fs::write(&cfg, r#"{"damping": 0.9}"#).unwrap();
    let o = artequity(&out, &["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn held_lock_blocks_a_second_writer() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join(".artequity.lock"), "").unwrap();
    let o = artequity(dir.path(), &["simulate"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("lock"));
}

#[test]
fn pipeline_is_idempotent_and_carries_provenance() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let cfg = cfg.to_str().unwrap();
    let out = dir.path().join("out");
    assert!(artequity(&out, &["simulate", "--config", cfg]).status.success());
    let o = artequity(&out, &["all", "--config", cfg]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).contains("AUCTION DISPARITY"));

    let snapshot = |stage: &str| {
        let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(out.join(stage))
            .unwrap()
            .map(|e| e.unwrap().path())
            .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
            .collect();
        files.sort();
        files
    };
    let before = snapshot("careers");
    assert!(artequity(&out, &["careers", "--config", cfg]).status.success());
    assert_eq!(before, snapshot("careers"));

    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out.join("regress/manifest.json")).unwrap()).unwrap();
    let fit: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("regress/fit.json")).unwrap()).unwrap();
    assert_eq!(manifest["config_digest"], fit["meta"]["config_digest"]);
    assert_eq!(fit["meta"]["config"]["seed"], 3);
    assert_eq!(fit["data"]["models"].as_array().unwrap().len(), 4);
    assert!(out.join("run_meta.json").exists());
    assert!(!out.join(".artequity.lock").exists());
}

#[test]
fn single_criterion_runs_and_downstream_reads_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let cfg = cfg.to_str().unwrap();
    let out = dir.path().join("out");
    assert!(artequity(&out, &["simulate", "--config", cfg]).status.success());
    let o = artequity(&out, &["all", "--config", cfg, "--criterion", "balanced"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(out.join("classify/institutions_balanced.csv").exists());
    assert!(!out.join("classify/institutions_neutral.csv").exists());
    let fit: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("regress/fit.json")).unwrap()).unwrap();
    assert_eq!(fit["data"]["criterion"], "gender_balanced");
}
