//! `koszul`: command-line front end for the decision engine.
//!
//! Exit codes: 0 computed (whatever the verdict), 2 input error,
//! 3 Koszulity criteria disagree, 1 any other failure.

mod cache;
mod commands;
mod config;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use koszul_core::{parse_poset, Error, GradedPoset, PosetError};
use serde_json::{json, Value};

use crate::cache::{sha256_hex, Cache};
use crate::commands::Side;
use crate::config::{FieldArg, Format, MaxWeight, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "koszul", version, about = "Exact Koszulity decisions for incidence rings and corings of graded posets")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Coefficient field: `rational` or `fp:P` for a prime P.
    #[arg(long, global = true, default_value = "rational")]
    field: FieldArg,

    /// Largest weight of reported Betti tables: `auto` (twice the poset length) or N.
    #[arg(long, global = true, default_value = "auto")]
    max_weight: MaxWeight,

    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,

    /// Directory of cached reports.
    #[arg(long, global = true)]
    cache: Option<PathBuf>,

    /// Worker threads; defaults to the available cores.
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    jobs: Option<u16>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide Koszulity of the incidence ring and coring and run the duality checks.
    Check {
        #[arg(long)]
        poset: PathBuf,
    },
    /// Bigraded Betti table of the incidence ring (Tor) or coring (Ext).
    Betti {
        #[arg(long)]
        poset: PathBuf,
        #[arg(long, value_enum, default_value = "ring")]
        side: Side,
    },
    /// The ζ-presentation of the shriek ring of the incidence coring.
    Shriek {
        #[arg(long)]
        poset: PathBuf,
    },
    /// Graded duals of the incidence structures.
    Dual {
        #[arg(long)]
        poset: PathBuf,
    },
    /// Sweep every graded poset within the bounds.
    Corpus {
        #[arg(long, default_value_t = 5)]
        max_elements: usize,
        #[arg(long)]
        max_length: Option<usize>,
    },
}

/// An input file that cannot be read.
#[derive(Debug)]
struct InputError(String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

fn load(path: &Path) -> Result<GradedPoset> {
    let text = std::fs::read_to_string(path).map_err(|e| InputError(format!("reading {}: {e}", path.display())))?;
    parse_poset(&text).with_context(|| format!("invalid poset file {}", path.display()))
}

/// Labels, sorted elements and sorted covers: equal for equal posets however listed.
fn canonical_input(p: &GradedPoset) -> Value {
    let doc = p.to_document();
    let mut elements = doc.elements;
    elements.sort();
    let mut covers = doc.covers;
    covers.sort();
    json!({ "elements": elements, "covers": covers })
}

fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if let Some(err) = cause.downcast_ref::<Error>() {
            match err {
                Error::CriteriaDisagreement(_) => return 3,
                Error::Poset(_) => return 2,
                _ => {}
            }
        }
        if cause.is::<PosetError>() || cause.is::<InputError>() {
            return 2;
        }
    }
    1
}

fn run(cli: Cli) -> Result<String> {
    let start = Instant::now();
    let jobs = cli
        .jobs
        .map(usize::from)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build_global()
        .context("starting the worker pool")?;
    let cfg = RunConfig {
        field: cli.field,
        max_weight: cli.max_weight,
        format: cli.format,
        cache_dir: cli.cache,
        jobs,
    };

    let (name, input, extra, poset) = match &cli.command {
        Command::Check { poset } => ("check", None, json!({}), Some(load(poset)?)),
        Command::Betti { poset, side } => ("betti", None, json!({ "side": format!("{side:?}").to_lowercase() }), Some(load(poset)?)),
        Command::Shriek { poset } => ("shriek", None, json!({}), Some(load(poset)?)),
        Command::Dual { poset } => ("dual", None, json!({}), Some(load(poset)?)),
        Command::Corpus { max_elements, max_length } => (
            "corpus",
            Some(json!({ "max_elements": max_elements, "max_length": max_length })),
            json!({}),
            None,
        ),
    };
    let canonical = input.unwrap_or_else(|| canonical_input(poset.as_ref().expect("poset commands load a poset")));
    let digest = sha256_hex(canonical.to_string().as_bytes());
    let mut config = cfg.echo();
    config.as_object_mut().expect("object").extend(extra.as_object().cloned().unwrap_or_default());
    let key = sha256_hex(
        json!({
            "command": name,
            "input": canonical,
            "config": config,
            "version": env!("CARGO_PKG_VERSION"),
            "schema": report::SCHEMA_VERSION,
        })
        .to_string()
        .as_bytes(),
    );

    let cache = cfg.cache_dir.as_deref().map(Cache::open).transpose()?;
    let cached = cache.as_ref().and_then(|c| c.get(&key));
    let hit = cached.is_some();
    let body = match cached {
        Some(body) => body,
        None => {
            let result = match (&cli.command, &poset) {
                (Command::Check { .. }, Some(p)) => commands::check(p, &cfg)?,
                (Command::Betti { side, .. }, Some(p)) => commands::betti(p, *side, &cfg)?,
                (Command::Shriek { .. }, Some(p)) => commands::shriek(p, &cfg)?,
                (Command::Dual { .. }, Some(p)) => commands::dual(p, &cfg)?,
                (Command::Corpus { max_elements, max_length }, _) => commands::corpus(*max_elements, *max_length, &cfg)?,
                _ => unreachable!("poset commands load a poset"),
            };
            let mut input = json!({ "digest": digest });
            if let Some(p) = &poset {
                input["poset"] = json!(p.to_document());
            }
            let body = report::body(name, input, config, result);
            if let Some(c) = &cache {
                c.put(&key, &body)?;
            }
            body
        }
    };
    let runtime = json!({
        "cache": match (&cache, hit) { (None, _) => "disabled", (Some(_), true) => "hit", (Some(_), false) => "miss" },
        "jobs": cfg.jobs,
        "total_ms": start.elapsed().as_secs_f64() * 1e3,
    });
    Ok(report::render(&report::with_runtime(body, runtime), cfg.format))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_by_error_kind() {
        let disagreement = anyhow::Error::from(Error::CriteriaDisagreement("x".into()));
        assert_eq!(exit_code(&disagreement.context("deciding")), 3);
        assert_eq!(exit_code(&anyhow::Error::from(InputError("missing".into()))), 2);
        assert_eq!(exit_code(&anyhow::Error::from(PosetError::Empty).context("loading")), 2);
        assert_eq!(exit_code(&anyhow::Error::from(Error::Invariant("x".into()))), 1);
    }

    #[test]
    fn canonical_input_ignores_listing_order() {
        let a = parse_poset(r#"{"elements":["a","b"],"covers":[["a","b"]]}"#).unwrap();
        let b = parse_poset(r#"{"elements":["b","a"],"covers":[["a","b"]]}"#).unwrap();
        assert_eq!(canonical_input(&a), canonical_input(&b));
    }
}
