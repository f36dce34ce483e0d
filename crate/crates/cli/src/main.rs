// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod artifacts;
mod config;
mod error;
mod report;
mod stages;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::artifacts::{Meta, OutputLock};
use crate::config::{CriterionSelection, Overrides, RunConfig};
use crate::error::CliError;
use crate::stages::Ctx;

const DEFAULTS: &str = "\
Config defaults (override any key in --config):
  inputs                      <out>/world/{artists,exhibitions,auctions}.csv
  filters                     start_year 1990, min_age 18, max_start_age 50, gender_threshold 0.6
  classify                    prior Beta(1, 1), evidence_threshold 3, countries true
  network                     damping 0.85, tolerance 1e-13, max_iter 10000, direction incoming
  careers                     min_exhibitions 10, baseline exhibition_weighted, lockin_window 5
  auctions                    career_length_edges 1..30, min_support 30
  regress                     tolerance 1e-8, max_iter 100, max_coefficient_norm 30;
                              criterion gender_neutral when selected
  simulate                    n_artists 10000, standard world

Exit codes: 0 success, 1 usage or config error, 2 data error, 3 numerical failure.";

/// Gender equity analysis of exhibition histories and auction outcomes.
#[derive(Debug, Parser)]
#[command(name = "artequity", version, after_help = DEFAULTS)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON run configuration; every key is optional and defaults apply.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory holding all stage artifacts.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Equity criteria to evaluate [default: both, or the config value].
    #[arg(long, global = true, value_enum)]
    criterion: Option<CriterionSelection>,

    /// Master seed for simulation [default: 0, or the config value].
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Validate and filter the corpus CSVs into <out>/corpus.
    Ingest,
    /// Classify institutions (and countries) with the Bayes-factor test.
    Classify,
    /// Build the co-exhibition network and institution prestige.
    Network,
    /// Career features, co-exhibition gender and lock-in.
    Careers,
    /// Auction disparity metrics and access-rate curves.
    Auctions,
    /// Fit the four auction-access logistic models.
    Regress,
    /// Render report.txt and report.json from existing artifacts.
    Report,
    /// Generate a synthetic world into <out>/world.
    Simulate,
    /// Run ingest through report in order.
    All,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Self::Ingest => "ingest",
            Self::Classify => "classify",
            Self::Network => "network",
            Self::Careers => "careers",
            Self::Auctions => "auctions",
            Self::Regress => "regress",
            Self::Report => "report",
            Self::Simulate => "simulate",
            Self::All => "all",
        }
    }

    fn run(self, ctx: &Ctx) -> Result<(), CliError> {
        match self {
            Self::Ingest => stages::ingest(ctx),
            Self::Classify => stages::classify(ctx),
            Self::Network => stages::network(ctx),
            Self::Careers => stages::careers(ctx),
            Self::Auctions => stages::auctions(ctx),
            Self::Regress => stages::regress(ctx),
            Self::Report => report::report(ctx),
            Self::Simulate => stages::simulate(ctx),
            Self::All => {
                for c in [
                    Self::Ingest,
                    Self::Classify,
                    Self::Network,
                    Self::Careers,
                    Self::Auctions,
                    Self::Regress,
                    Self::Report,
                ] {
                    c.run(ctx)?;
                }
                Ok(())
            }
        }
    }
}

/// Run bookkeeping kept apart from the deterministic artifacts.
#[derive(Serialize)]
struct RunMeta<'a> {
    command: &'a str,
    version: &'a str,
    config_digest: &'a str,
    started_unix_ms: u128,
    finished_unix_ms: u128,
    status: String,
}

fn now_ms() -> u128 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis()).unwrap_or(0)
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let overrides = Overrides { criterion: cli.criterion, seed: cli.seed };
    let cfg = RunConfig::load(cli.config.as_deref(), &overrides)?;
    let meta = Meta { config_digest: cfg.digest(), config: cfg.clone() };
    let _lock = OutputLock::acquire(&cli.out)?;
    let started = now_ms();
    let ctx = Ctx { out: &cli.out, cfg: &cfg, meta };
    let result = cli.command.run(&ctx);
    let run_meta = RunMeta {
        command: cli.command.name(),
        version: env!("CARGO_PKG_VERSION"),
        config_digest: &ctx.meta.config_digest,
        started_unix_ms: started,
        finished_unix_ms: now_ms(),
        status: match &result {
            Ok(()) => "ok".into(),
            Err(e) => format!("error: {e}"),
        },
    };
    let path = cli.out.join("run_meta.json");
    let text = serde_json::to_string_pretty(&run_meta)? + "\n";
    std::fs::write(&path, text).map_err(CliError::io(&path))?;
    result
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
