use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use serde::Serialize;
use snip_core::corpus::{
    ingest, merge_title_changes, read_merge_map, DocType, IngestConfig, IngestReport, Year,
};

use crate::config::Settings;
use crate::manifest::{Inputs, Outcome};

pub const CORPUS_FILE: &str = "corpus.bin";
pub const REPORT_FILE: &str = "ingest_report.json";
pub const WARNINGS_FILE: &str = "warnings.txt";

#[derive(Args, Debug, Default)]
pub struct IngestArgs {
    /// Journal list (`journal_id,title,is_trade`)
    #[arg(long)]
    pub journals: Option<PathBuf>,
    /// One JSON publication record per line
    #[arg(long)]
    pub publications: Option<PathBuf>,
    /// Title changes (`old_journal_id,new_journal_id`) applied after ingestion
    #[arg(long)]
    pub merges: Option<PathBuf>,
    /// Year of analysis
    #[arg(long)]
    pub year: Option<Year>,
    /// Document types to keep, comma separated [default: article,conference paper,review]
    #[arg(long, value_delimiter = ',')]
    pub doc_types: Option<Vec<String>>,
}

#[derive(Serialize)]
struct IngestSummary<'a> {
    year_of_analysis: Year,
    corpus_hash: String,
    doc_types: Vec<&'a str>,
    journals_after_merges: usize,
    publications: usize,
    references: usize,
    merges_applied: usize,
    #[serde(flatten)]
    report: &'a IngestReport,
}

pub fn run(args: IngestArgs, settings: &mut Settings, inputs: &mut Inputs) -> Result<Outcome> {
    let journals_path: PathBuf = settings.required("journals", args.journals)?;
    let pubs_path: PathBuf = settings.required("publications", args.publications)?;
    let merges_path: Option<PathBuf> = settings.optional("merges", args.merges)?;
    let year: Year = settings.required("year", args.year)?;
    let doc_types: Option<Vec<String>> = settings.optional("doc_types", args.doc_types)?;

    let mut config = IngestConfig::new(year);
    if let Some(types) = doc_types {
        config.doc_types = types
            .iter()
            .filter(|t| !t.trim().is_empty())
            .map(|t| DocType::new(t))
            .collect();
        if config.doc_types.is_empty() {
            bail!("--doc-types must name at least one document type");
        }
    }

    let journals = inputs.read(&journals_path)?;
    let publications = inputs.read(&pubs_path)?;
    let (corpus, mut report) = ingest(journals.as_slice(), publications.as_slice(), &config)
        .with_context(|| format!("ingesting {}", pubs_path.display()))?;

    let mut merges_applied = 0;
    let corpus = match merges_path {
        Some(path) => {
            let bytes = inputs.read(&path)?;
            let (map, errors) =
                read_merge_map(bytes.as_slice()).with_context(|| format!("reading {}", path.display()))?;
            report.record_errors.extend(errors);
            merges_applied = map
                .iter()
                .filter(|(old, _)| corpus.journal_idx(old.as_str()).is_some())
                .count();
            merge_title_changes(&corpus, &map).with_context(|| format!("applying {}", path.display()))?
        }
        None => corpus,
    };

    let summary = IngestSummary {
        year_of_analysis: year,
        corpus_hash: corpus.canonical_hash(),
        doc_types: config.doc_types.iter().map(DocType::as_str).collect(),
        journals_after_merges: corpus.num_journals(),
        publications: corpus.num_publications(),
        references: corpus.total_references(),
        merges_applied,
        report: &report,
    };

    let mut outcome = Outcome::default();
    outcome.add(CORPUS_FILE, corpus.to_cache_bytes()?);
    outcome.add_json(REPORT_FILE, &summary)?;
    if report.has_warnings() {
        let mut text = String::new();
        for e in &report.record_errors {
            writeln!(text, "{}:{}: {}", e.source, e.line, e.message)?;
        }
        outcome.add(WARNINGS_FILE, text.into_bytes());
        outcome.warnings.push(format!(
            "{} record issue(s) written to {WARNINGS_FILE}",
            report.record_errors.len()
        ));
    } else {
        outcome.stale.push(WARNINGS_FILE.to_owned());
    }
    outcome.summary.push(format!(
        "ingested {} journals and {} publications for {year}",
        corpus.num_journals(),
        corpus.num_publications()
    ));
    Ok(outcome)
}
