use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use snip_core::indicators::{build_table, write_scores_csv, IndicatorMode, DEFAULT_MIN_PUBS};

use super::{citing_set, load_corpus, selection_config, CitingSource};
use crate::config::Settings;
use crate::manifest::{Inputs, Outcome};

pub const SCORES_CSV: &str = "scores.csv";
pub const SCORES_JSON: &str = "scores.json";

#[derive(Args, Debug, Default)]
pub struct ComputeArgs {
    /// Corpus cache written by `snip ingest`
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// rip, snip-original, snip-revised, audience-factor, fractional-counting or apriori
    #[arg(long)]
    pub mode: Option<IndicatorMode>,
    /// `all`, `select` (run the selection here) or a selection.json [default: select]
    #[arg(long)]
    pub citing_set: Option<CitingSource>,
    /// Journals below this many cited-window publications are flagged [default: 100]
    #[arg(long)]
    pub min_pubs: Option<u64>,
    /// Selection threshold when the selection runs here [default: 0.2]
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Selection round limit [default: 1000]
    #[arg(long)]
    pub max_iterations: Option<usize>,
}

pub fn run(args: ComputeArgs, settings: &mut Settings, inputs: &mut Inputs) -> Result<Outcome> {
    let corpus_path: PathBuf = settings.required("corpus", args.corpus)?;
    let mode: IndicatorMode = settings.required("mode", args.mode)?;
    let source = settings.or("citing_set", args.citing_set, CitingSource::Select)?;
    let min_pubs = settings.or("min_pubs", args.min_pubs, DEFAULT_MIN_PUBS)?;
    let config = selection_config(settings, args.threshold, args.max_iterations)?;

    let corpus = load_corpus(&corpus_path, inputs)?;
    let mut outcome = Outcome::default();
    let citing = citing_set(&source, &corpus, config, inputs, &mut outcome)?;
    let table = build_table(&corpus, mode, &citing, min_pubs)?;

    let mut csv = Vec::new();
    write_scores_csv(&mut csv, &table)?;
    outcome.add(SCORES_CSV, csv);
    outcome.add_json(SCORES_JSON, &table.document())?;
    outcome.summary.push(format!(
        "{} journals scored ({mode}, {} citing journals)",
        table.scores.len(),
        citing.len()
    ));
    Ok(outcome)
}
