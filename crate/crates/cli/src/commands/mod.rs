pub mod compare;
pub mod compute;
pub mod ingest;
pub mod select;
pub mod simulate;

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use serde::{Serialize, Serializer};
use snip_core::corpus::{Corpus, JournalSet};
use snip_core::indicators::IndicatorMode;
use snip_core::selection::{
    select_citing_journals, CitingJournalSet, SelectionConfig, SelectionDocument,
    DEFAULT_MAX_ITERATIONS, DEFAULT_THRESHOLD,
};

use crate::config::{ConfigValue, Settings};
use crate::manifest::{Inputs, Outcome};

pub const SELECTION_FILE: &str = "selection.json";

pub fn load_corpus(path: &Path, inputs: &mut Inputs) -> Result<Corpus> {
    let bytes = inputs.read(path)?;
    Corpus::from_cache_bytes(&bytes)
        .with_context(|| format!("{} is not a corpus cache written by `snip ingest`", path.display()))
}

impl ConfigValue for IndicatorMode {
    const EXPECTED: &'static str = "an indicator mode name";
    fn from_toml(value: &toml::Value, _: &Path) -> Option<Self> {
        value.as_str()?.parse().ok()
    }
}

/// Where the citing-journal set of a computation comes from.
#[derive(Clone, Debug, PartialEq)]
pub enum CitingSource {
    All,
    /// Run the selection on the corpus first.
    Select,
    /// A `selection.json` from an earlier run.
    File(PathBuf),
}

impl FromStr for CitingSource {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s {
            "all" => CitingSource::All,
            "select" => CitingSource::Select,
            path => CitingSource::File(PathBuf::from(path)),
        })
    }
}

impl fmt::Display for CitingSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CitingSource::All => f.write_str("all"),
            CitingSource::Select => f.write_str("select"),
            CitingSource::File(p) => write!(f, "{}", p.display()),
        }
    }
}

impl Serialize for CitingSource {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl ConfigValue for CitingSource {
    const EXPECTED: &'static str = "`all`, `select` or a path to selection.json";
    fn from_toml(value: &toml::Value, base: &Path) -> Option<Self> {
        Some(match value.as_str()?.parse().ok()? {
            CitingSource::File(p) => CitingSource::File(base.join(p)),
            other => other,
        })
    }
}

pub fn selection_config(
    settings: &mut Settings,
    threshold: Option<f64>,
    max_iterations: Option<usize>,
) -> Result<SelectionConfig> {
    let threshold = settings.or("threshold", threshold, DEFAULT_THRESHOLD)?;
    let max_iterations = settings.or("max_iterations", max_iterations, DEFAULT_MAX_ITERATIONS)?;
    if !(threshold > 0.0 && threshold <= 1.0) {
        bail!("--threshold must satisfy 0 < t <= 1, got {threshold}");
    }
    if max_iterations == 0 {
        bail!("--max-iterations must be at least 1");
    }
    Ok(SelectionConfig {
        threshold,
        max_iterations,
    })
}

pub fn run_selection(corpus: &Corpus, config: SelectionConfig) -> Result<CitingJournalSet> {
    select_citing_journals(corpus, config).context("selecting citing journals")
}

/// Resolves `source` against `corpus`, adding `selection.json` to the
/// outputs when the selection was run here.
pub fn citing_set(
    source: &CitingSource,
    corpus: &Corpus,
    config: SelectionConfig,
    inputs: &mut Inputs,
    outcome: &mut Outcome,
) -> Result<JournalSet> {
    match source {
        CitingSource::All => Ok(JournalSet::all(corpus)),
        CitingSource::Select => {
            let selection = run_selection(corpus, config)?;
            outcome.add_json(SELECTION_FILE, &selection.document(corpus))?;
            Ok(selection.included)
        }
        CitingSource::File(path) => {
            let bytes = inputs.read(path)?;
            let doc: SelectionDocument = serde_json::from_slice(&bytes)
                .with_context(|| format!("{} is not a selection.json", path.display()))?;
            if doc.year != corpus.year() {
                bail!(
                    "{} was selected for {} but the corpus is for {}",
                    path.display(),
                    doc.year,
                    corpus.year()
                );
            }
            doc.citing_set(corpus)
                .with_context(|| format!("applying {}", path.display()))
        }
    }
}
