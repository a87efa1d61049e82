use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use serde::Serialize;
use snip_core::corpus::{write_journals_csv, write_publications_jsonl, JournalSet, Year};
use snip_core::indicators::IndicatorMode;
use snip_core::synthlab::{bias_report, generate, mu_per_field, FieldMuDocument, SynthSpec};

use super::{run_selection, selection_config, SELECTION_FILE};
use crate::config::Settings;
use crate::manifest::{Inputs, Outcome};

pub const SIMULATION_FILE: &str = "simulation.json";
pub const BIAS_FILE: &str = "bias_report.json";
pub const JOURNALS_FILE: &str = "journals.csv";
pub const PUBLICATIONS_FILE: &str = "publications.jsonl";

#[derive(Args, Debug, Default)]
pub struct SimulateArgs {
    /// JSON world specification
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Restrict citing journals by the selection procedure instead of using all
    #[arg(long)]
    pub use_selection: bool,
    /// Also write the generated journals.csv and publications.jsonl
    #[arg(long)]
    pub export: bool,
    /// Selection threshold with --use-selection [default: 0.2]
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Selection round limit [default: 1000]
    #[arg(long)]
    pub max_iterations: Option<usize>,
}

#[derive(Serialize)]
struct SimulationDocument {
    seed: u64,
    year_of_analysis: Year,
    corpus_hash: String,
    journals: usize,
    publications: usize,
    citing_journals: usize,
    fields: Vec<FieldMuDocument>,
}

pub fn run(args: SimulateArgs, settings: &mut Settings, inputs: &mut Inputs) -> Result<Outcome> {
    let spec_path: PathBuf = settings.required("spec", args.spec)?;
    let use_selection = settings.switch("use_selection", args.use_selection)?;
    let export = settings.switch("export", args.export)?;
    let config = if use_selection {
        Some(selection_config(settings, args.threshold, args.max_iterations)?)
    } else {
        None
    };

    let bytes = inputs.read(&spec_path)?;
    let spec: SynthSpec = serde_json::from_slice(&bytes)
        .with_context(|| format!("{} is not a valid world spec", spec_path.display()))?;
    let world = generate(&spec)?;
    let corpus = &world.corpus;

    let mut outcome = Outcome::default();
    let citing = match config {
        Some(config) => {
            let selection = run_selection(corpus, config)?;
            outcome.add_json(SELECTION_FILE, &selection.document(corpus))?;
            selection.included
        }
        None => JournalSet::all(corpus),
    };
    let mus = mu_per_field(corpus, &citing, &world.field_of)?;
    let bias = bias_report(&world, &citing, &IndicatorMode::ALL)?;

    let names = world.field_names();
    let fields: Vec<FieldMuDocument> = mus.iter().map(|fm| fm.document(&names[fm.field])).collect();
    for f in &fields {
        let show = |v: Option<f64>| v.map_or("undefined".to_owned(), |v| format!("{v:.6}"));
        outcome.summary.push(format!(
            "field {}: mu {} (3*M2/M1 = {})",
            f.name,
            show(f.mu),
            show(f.expected)
        ));
    }
    outcome.add_json(
        SIMULATION_FILE,
        &SimulationDocument {
            seed: spec.seed,
            year_of_analysis: spec.year_of_analysis,
            corpus_hash: corpus.canonical_hash(),
            journals: corpus.num_journals(),
            publications: corpus.num_publications(),
            citing_journals: citing.len(),
            fields,
        },
    )?;
    outcome.add_json(BIAS_FILE, &bias)?;
    if export {
        let mut journals = Vec::new();
        write_journals_csv(&mut journals, &world.journals)?;
        let mut publications = Vec::new();
        write_publications_jsonl(&mut publications, &world.publications)?;
        outcome.add(JOURNALS_FILE, journals);
        outcome.add(PUBLICATIONS_FILE, publications);
    }
    let failed: Vec<&str> = bias.modes.iter().filter(|m| !m.pass).map(|m| m.mode.as_str()).collect();
    if !failed.is_empty() {
        outcome.warnings.push(format!(
            "field means contradict the predicted outcome for: {}",
            failed.join(", ")
        ));
    }
    Ok(outcome)
}
