use std::path::PathBuf;

use anyhow::Result;
use clap::Args;

use super::{load_corpus, run_selection, selection_config, SELECTION_FILE};
use crate::config::Settings;
use crate::manifest::{Inputs, Outcome};

#[derive(Args, Debug, Default)]
pub struct SelectArgs {
    /// Corpus cache written by `snip ingest`
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Minimum share of publications with an active reference [default: 0.2]
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Give up after this many rounds [default: 1000]
    #[arg(long)]
    pub max_iterations: Option<usize>,
}

pub fn run(args: SelectArgs, settings: &mut Settings, inputs: &mut Inputs) -> Result<Outcome> {
    let corpus_path: PathBuf = settings.required("corpus", args.corpus)?;
    let config = selection_config(settings, args.threshold, args.max_iterations)?;
    let corpus = load_corpus(&corpus_path, inputs)?;
    let selection = run_selection(&corpus, config)?;

    let mut outcome = Outcome::default();
    outcome.add_json(SELECTION_FILE, &selection.document(&corpus))?;
    outcome.summary.push(format!(
        "{} citing journals, {} excluded, {} iteration(s)",
        selection.included.len(),
        selection.excluded.len(),
        selection.iterations
    ));
    Ok(outcome)
}
