//! Journal indicators: RIP, original SNIP, revised SNIP and the
//! audience-factor / fractional-counting / a-priori variants, plus the
//! table-level comparison statistics.
//!
//! All arithmetic is exact ([`Ratio`]); conversion to `f64` happens only when
//! values are reported.

mod compare;
mod original;
mod revised;
mod table;
mod variants;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, JournalId, JournalIdx, JournalSet, PubIdx};
use crate::error::{Error, Result};
use crate::exact::{self, Ratio};

pub use compare::{
    compare_tables, pearson, snip_difference, ComparisonReport, DifferenceEntry,
    DifferenceReport, ScatterPoint,
};
pub use original::{
    dcp_original, median_dcp, rip, snip_original, snip_original_with_median,
    subject_field_original,
};
pub use revised::{
    cohort_active_share, dcp_revised, snip_from_entries, snip_revised, snip_revised_a2,
    subject_field_revised, RevisedSubjectField,
};
pub use table::{build_table, read_scores_csv, write_scores_csv, IndicatorTable, TableDocument};
pub use variants::variant_indicator;

/// Reporting filter used by default when comparing tables.
pub const DEFAULT_MIN_PUBS: u64 = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IndicatorMode {
    Rip,
    SnipOriginal,
    SnipRevised,
    AudienceFactor,
    FractionalCounting,
    Apriori,
}

impl IndicatorMode {
    pub const ALL: [IndicatorMode; 6] = [
        IndicatorMode::Rip,
        IndicatorMode::SnipOriginal,
        IndicatorMode::SnipRevised,
        IndicatorMode::AudienceFactor,
        IndicatorMode::FractionalCounting,
        IndicatorMode::Apriori,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            IndicatorMode::Rip => "rip",
            IndicatorMode::SnipOriginal => "snip-original",
            IndicatorMode::SnipRevised => "snip-revised",
            IndicatorMode::AudienceFactor => "audience-factor",
            IndicatorMode::FractionalCounting => "fractional-counting",
            IndicatorMode::Apriori => "apriori",
        }
    }

    /// Modes whose score is `(3/m)` times a sum of per-citation weights.
    pub fn is_weighted_citation_sum(self) -> bool {
        matches!(
            self,
            IndicatorMode::SnipRevised
                | IndicatorMode::AudienceFactor
                | IndicatorMode::FractionalCounting
                | IndicatorMode::Apriori
        )
    }
}

impl fmt::Display for IndicatorMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for IndicatorMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('_', "-");
        IndicatorMode::ALL
            .into_iter()
            .find(|m| m.as_str() == norm)
            .ok_or_else(|| {
                Error::InvalidValue(format!(
                    "unknown indicator mode `{s}` (expected one of: {})",
                    IndicatorMode::ALL.map(|m| m.as_str()).join(", ")
                ))
            })
    }
}

/// Share of a journal-year cohort having at least one active reference.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CohortShare {
    pub active: u64,
    pub total: u64,
}

impl CohortShare {
    pub fn ratio(self) -> Ratio {
        exact::ratio(self.active, self.total)
    }

    pub fn to_f64(self) -> f64 {
        self.active as f64 / self.total as f64
    }
}

/// One citing publication in a journal's subject field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubjectFieldEntry {
    pub citing: PubIdx,
    /// Active references of the citing publication.
    pub r: u64,
    /// Cohort share of the citing journal; `None` in original mode.
    pub p: Option<CohortShare>,
    /// Qualifying references into the cited journal (revised mode) or 1.
    pub multiplicity: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreFlags {
    pub is_citing_journal: bool,
    pub below_min_pubs: bool,
    /// Citation events dropped because the citing publication has no active
    /// reference.
    pub zero_active_dropped: u64,
}

impl ScoreFlags {
    pub fn render(&self) -> String {
        let mut parts = Vec::new();
        if self.is_citing_journal {
            parts.push("citing".to_owned());
        }
        if self.below_min_pubs {
            parts.push("below_min_pubs".to_owned());
        }
        if self.zero_active_dropped > 0 {
            parts.push(format!("zero_active_dropped={}", self.zero_active_dropped));
        }
        parts.join(";")
    }

    pub fn parse(s: &str) -> Result<Self> {
        let mut flags = ScoreFlags::default();
        for token in s.split(';').map(str::trim).filter(|t| !t.is_empty()) {
            match token.split_once('=') {
                None if token == "citing" => flags.is_citing_journal = true,
                None if token == "below_min_pubs" => flags.below_min_pubs = true,
                Some(("zero_active_dropped", n)) => {
                    flags.zero_active_dropped = n
                        .parse()
                        .map_err(|_| Error::InvalidValue(format!("bad flag `{token}`")))?
                }
                _ => return Err(Error::InvalidValue(format!("unknown flag `{token}`"))),
            }
        }
        Ok(flags)
    }
}

/// Per-journal result. `None` marks an undefined value, never zero.
#[derive(Clone, Debug, PartialEq)]
pub struct JournalScore {
    pub journal: JournalId,
    pub m: u64,
    pub n: u64,
    pub rip: Option<Ratio>,
    pub dcp: Option<Ratio>,
    pub rdcp: Option<Ratio>,
    pub snip: Option<Ratio>,
    pub flags: ScoreFlags,
}

impl JournalScore {
    pub(crate) fn undefined(journal: JournalId) -> Self {
        JournalScore {
            journal,
            m: 0,
            n: 0,
            rip: None,
            dcp: None,
            rdcp: None,
            snip: None,
            flags: ScoreFlags::default(),
        }
    }

    pub fn snip_f64(&self) -> Option<f64> {
        self.snip.as_ref().map(exact::to_f64)
    }

    pub fn rip_f64(&self) -> Option<f64> {
        self.rip.as_ref().map(exact::to_f64)
    }

    pub fn dcp_f64(&self) -> Option<f64> {
        self.dcp.as_ref().map(exact::to_f64)
    }
}

/// Per-corpus precomputation shared by all journals of one indicator run:
/// active-reference counts of every year-of-analysis publication and the
/// active share of every citing cohort, both measured against `citing`.
pub struct CitingContext<'a> {
    corpus: &'a Corpus,
    citing: JournalSet,
    /// Indexed by publication; only year-of-analysis entries are meaningful.
    active_refs: Vec<u64>,
    cohort: Vec<Option<CohortShare>>,
    /// Sum of active references over the cohort, for the audience factor.
    cohort_active_refs: Vec<u64>,
}

impl<'a> CitingContext<'a> {
    pub fn new(corpus: &'a Corpus, citing: &JournalSet) -> Self {
        let year = corpus.year();
        let active_refs: Vec<u64> = corpus
            .publications()
            .par_iter()
            .map(|p| {
                if p.year != year {
                    return 0;
                }
                p.references
                    .iter()
                    .map(|&t| corpus.publication(t))
                    .filter(|t| corpus.in_cited_window(t.year) && citing.contains(t.journal))
                    .count() as u64
            })
            .collect();
        let (cohort, cohort_active_refs) = corpus
            .journal_indices()
            .map(|j| {
                let pubs = corpus.pubs_of(j, year);
                if pubs.is_empty() {
                    return (None, 0);
                }
                let active = pubs.iter().filter(|p| active_refs[p.index()] > 0).count() as u64;
                let refs = pubs.iter().map(|p| active_refs[p.index()]).sum();
                (
                    Some(CohortShare {
                        active,
                        total: pubs.len() as u64,
                    }),
                    refs,
                )
            })
            .unzip();
        CitingContext {
            corpus,
            citing: citing.clone(),
            active_refs,
            cohort,
            cohort_active_refs,
        }
    }

    pub fn corpus(&self) -> &'a Corpus {
        self.corpus
    }

    pub fn citing(&self) -> &JournalSet {
        &self.citing
    }

    pub fn active_refs(&self, p: PubIdx) -> u64 {
        self.active_refs[p.index()]
    }

    pub fn cohort(&self, j: JournalIdx) -> Option<CohortShare> {
        self.cohort[j.index()]
    }

    pub fn cohort_active_refs(&self, j: JournalIdx) -> u64 {
        self.cohort_active_refs[j.index()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_parsing() {
        assert_eq!("snip-revised".parse::<IndicatorMode>().unwrap(), IndicatorMode::SnipRevised);
        assert_eq!("SNIP_ORIGINAL".parse::<IndicatorMode>().unwrap(), IndicatorMode::SnipOriginal);
        assert!("snip".parse::<IndicatorMode>().is_err());
        for m in IndicatorMode::ALL {
            assert_eq!(m.as_str().parse::<IndicatorMode>().unwrap(), m);
        }
    }

    #[test]
    fn flags_render_and_parse() {
        let f = ScoreFlags {
            is_citing_journal: true,
            below_min_pubs: true,
            zero_active_dropped: 3,
        };
        assert_eq!(f.render(), "citing;below_min_pubs;zero_active_dropped=3");
        assert_eq!(ScoreFlags::parse(&f.render()).unwrap(), f);
        assert_eq!(ScoreFlags::parse("").unwrap(), ScoreFlags::default());
        assert!(ScoreFlags::parse("weird").is_err());
    }
}
