use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate pub_id `{0}`")]
    DuplicatePubId(String),

    #[error("unknown journal `{0}`")]
    UnknownJournal(String),

    #[error("title-change merge map contains a cycle: {}", .0.join(" -> "))]
    MergeCycle(Vec<String>),

    #[error("merge target `{target}` for `{source_id}` is not a journal in the corpus")]
    UnknownMergeTarget { source_id: String, target: String },

    #[error("threshold must satisfy 0 < t <= 1, got {0}")]
    InvalidThreshold(f64),

    #[error("citing-journal selection did not converge within {0} iterations")]
    SelectionDidNotConverge(usize),

    #[error("selection universe is empty: no journal has publications in {0}")]
    EmptySelectionUniverse(i32),

    #[error("journal `{journal}` has no publications in {year}")]
    EmptyCohort { journal: String, year: i32 },

    #[error("median DCP is zero; original SNIP is undefined for this corpus")]
    ZeroMedianDcp,

    #[error("comparison needs at least 2 common journals, found {0}")]
    TooFewCommonJournals(usize),

    #[error("tables disagree on year of analysis ({0} vs {1})")]
    YearMismatch(i32, i32),

    #[error("journal `{0}` has no field assignment")]
    UnassignedJournal(String),

    #[error("infeasible synthetic spec: {0}")]
    InfeasibleSpec(String),

    #[error("invalid value: {0}")]
    InvalidValue(String),

    #[error("corrupt corpus cache: {0}")]
    CorruptCache(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Bincode(#[from] bincode::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
