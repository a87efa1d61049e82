//! `snip`: corpus ingestion, citing-journal selection, indicator tables,
//! table comparison and synthetic experiments.
//!
//! Exit status is 0 on success, 1 when outputs were written but warnings
//! were raised, and 2 on any hard error (in which case nothing is written).

mod commands;
mod config;
mod manifest;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use chrono::Utc;
use clap::{Parser, Subcommand};

use commands::compare::CompareArgs;
use commands::compute::ComputeArgs;
use commands::ingest::IngestArgs;
use commands::select::SelectArgs;
use commands::simulate::SimulateArgs;
use config::{Config, Settings};
use manifest::{Inputs, Run};

#[derive(Parser, Debug)]
#[command(name = "snip", version, about = "Source-normalized journal citation indicators")]
struct Cli {
    /// TOML file of `flag = value` defaults; command-line flags take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for parallel stages [default: one per core]
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Directory receiving the outputs and manifest.json [default: snip-out]
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Read journals and publications into a corpus cache
    Ingest(IngestArgs),
    /// Select the citing journals of a corpus
    Select(SelectArgs),
    /// Score every journal of a corpus with one indicator
    Compute(ComputeArgs),
    /// Correlate two score tables and rank revised-minus-original differences
    Compare(CompareArgs),
    /// Generate a synthetic world and check field means against predictions
    Simulate(SimulateArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Ingest(_) => "ingest",
            Command::Select(_) => "select",
            Command::Compute(_) => "compute",
            Command::Compare(_) => "compare",
            Command::Simulate(_) => "simulate",
        }
    }
}

enum Status {
    Clean,
    Warnings,
}

fn run(cli: Cli) -> Result<Status> {
    let started = Utc::now();
    let mut inputs = Inputs::default();
    let config = match &cli.config {
        Some(path) => {
            let bytes = inputs.read(path)?;
            let text = String::from_utf8(bytes).with_context(|| format!("{} is not UTF-8", path.display()))?;
            let base = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
            Config::parse(&text, base).with_context(|| format!("reading {}", path.display()))?
        }
        None => Config::default(),
    };
    let mut settings = Settings::new(&config);
    if let Some(n) = settings.optional::<usize>("threads", cli.threads)? {
        if n == 0 {
            bail!("--threads must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let out_dir = settings.or("out_dir", cli.out_dir, PathBuf::from("snip-out"))?;

    let command = cli.command.name();
    let outcome = match cli.command {
        Command::Ingest(args) => commands::ingest::run(args, &mut settings, &mut inputs),
        Command::Select(args) => commands::select::run(args, &mut settings, &mut inputs),
        Command::Compute(args) => commands::compute::run(args, &mut settings, &mut inputs),
        Command::Compare(args) => commands::compare::run(args, &mut settings, &mut inputs),
        Command::Simulate(args) => commands::simulate::run(args, &mut settings, &mut inputs),
    }?;

    let run = Run {
        command: command.to_owned(),
        settings: settings.into_resolved(),
        inputs,
        started,
    };
    let manifest = manifest::write_outputs(&out_dir, run, &outcome)?;
    for line in &outcome.summary {
        println!("{line}");
    }
    println!("wrote {} file(s) and {}", outcome.outputs.len(), manifest.display());
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    Ok(if outcome.warnings.is_empty() { Status::Clean } else { Status::Warnings })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Status::Clean) => ExitCode::SUCCESS,
        Ok(Status::Warnings) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
