//! Resolved citation corpus for one year of analysis.
//!
//! A [`Corpus`] is built once (by [`ingest`] or from a cache snapshot) and is
//! immutable afterwards. Publications and journals are stored densely and
//! addressed by [`PubIdx`] / [`JournalIdx`]; both vectors are sorted by their
//! external identifier so that every derived index is independent of input
//! order.

mod cache;
mod export;
mod ingest;
mod merge;
mod set;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub use cache::CorpusSnapshot;
pub use export::{write_journals_csv, write_merges_csv, write_publications_jsonl};
pub use ingest::{
    ingest, ingest_records, IngestConfig, IngestReport, JournalRecord, PublicationRecord,
    RecordError,
};
pub use merge::{merge_title_changes, read_merge_map, MergeMap};
pub use set::JournalSet;

pub type Year = i32;

/// Number of cited years preceding the year of analysis.
pub const CITED_WINDOW_YEARS: Year = 3;

/// Look-back used to delineate the subject field of the original indicator.
pub const EXTENDED_WINDOW_YEARS: Year = 8;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct JournalId(pub String);

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PubId(pub String);

macro_rules! string_id {
    ($t:ty) => {
        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $t {
            fn from(s: &str) -> Self {
                Self(s.to_owned())
            }
        }

        impl From<String> for $t {
            fn from(s: String) -> Self {
                Self(s)
            }
        }

        impl std::borrow::Borrow<str> for $t {
            fn borrow(&self) -> &str {
                &self.0
            }
        }

        impl $t {
            pub fn as_str(&self) -> &str {
                &self.0
            }
        }
    };
}

string_id!(JournalId);
string_id!(PubId);

/// Dense index of a journal inside one [`Corpus`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JournalIdx(pub u32);

/// Dense index of a publication inside one [`Corpus`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PubIdx(pub u32);

impl JournalIdx {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl PubIdx {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Normalized document type: lower case, runs of spaces and hyphens folded
/// into `_` (so `"Conference Paper"` and `conference_paper` compare equal).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DocType(String);

impl DocType {
    pub fn new(raw: &str) -> Self {
        let mut out = String::with_capacity(raw.len());
        let mut pending_sep = false;
        for c in raw.trim().chars() {
            if c == ' ' || c == '-' || c == '_' {
                pending_sep = !out.is_empty();
            } else {
                if pending_sep {
                    out.push('_');
                    pending_sep = false;
                }
                out.extend(c.to_lowercase());
            }
        }
        DocType(out)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// `article`, `conference_paper`, `review`.
    pub fn default_allowlist() -> BTreeSet<DocType> {
        ["article", "conference paper", "review"]
            .into_iter()
            .map(DocType::new)
            .collect()
    }
}

impl fmt::Display for DocType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Journal {
    pub id: JournalId,
    /// Every known title, including titles of merged predecessors.
    pub titles: Vec<String>,
    pub is_trade: bool,
    pub predecessor_ids: Vec<JournalId>,
}

/// A publication of the working corpus. Every publication stored in a
/// corpus passed the document-type allowlist and carries reference data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Publication {
    pub id: PubId,
    pub journal: JournalIdx,
    pub year: Year,
    pub doc_type: DocType,
    /// Resolved, deduplicated in-corpus targets, sorted by index.
    pub references: Vec<PubIdx>,
    /// Distinct raw references excluding self-references, resolved or not.
    pub raw_reference_count: u32,
}

/// One (citing publication, cited publication) pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CitationEvent {
    pub citing: PubIdx,
    pub cited: PubIdx,
}

#[derive(Debug, Clone)]
pub struct Corpus {
    year: Year,
    doc_types: BTreeSet<DocType>,
    journals: Vec<Journal>,
    journal_lookup: HashMap<JournalId, JournalIdx>,
    publications: Vec<Publication>,
    pub_lookup: HashMap<PubId, PubIdx>,
    by_journal_year: Vec<BTreeMap<Year, Vec<PubIdx>>>,
    /// For every publication: citing publications from the year of analysis.
    cited_by: Vec<Vec<PubIdx>>,
}

impl Corpus {
    pub fn empty(year: Year) -> Self {
        Self::from_parts(year, DocType::default_allowlist(), Vec::new(), Vec::new())
    }

    /// Builds the derived indices. `journals` and `publications` must be
    /// sorted by id and every index they contain must be in range; callers
    /// inside this module guarantee both.
    pub(crate) fn from_parts(
        year: Year,
        doc_types: BTreeSet<DocType>,
        journals: Vec<Journal>,
        publications: Vec<Publication>,
    ) -> Self {
        debug_assert!(journals.windows(2).all(|w| w[0].id < w[1].id));
        debug_assert!(publications.windows(2).all(|w| w[0].id < w[1].id));

        let journal_lookup = journals
            .iter()
            .enumerate()
            .map(|(i, j)| (j.id.clone(), JournalIdx(i as u32)))
            .collect();
        let pub_lookup = publications
            .iter()
            .enumerate()
            .map(|(i, p)| (p.id.clone(), PubIdx(i as u32)))
            .collect();

        let mut by_journal_year: Vec<BTreeMap<Year, Vec<PubIdx>>> =
            vec![BTreeMap::new(); journals.len()];
        let mut cited_by: Vec<Vec<PubIdx>> = vec![Vec::new(); publications.len()];
        for (i, p) in publications.iter().enumerate() {
            let idx = PubIdx(i as u32);
            by_journal_year[p.journal.index()]
                .entry(p.year)
                .or_default()
                .push(idx);
            if p.year == year {
                for &target in &p.references {
                    cited_by[target.index()].push(idx);
                }
            }
        }

        Corpus {
            year,
            doc_types,
            journals,
            journal_lookup,
            publications,
            pub_lookup,
            by_journal_year,
            cited_by,
        }
    }

    pub fn year(&self) -> Year {
        self.year
    }

    pub fn doc_types(&self) -> &BTreeSet<DocType> {
        &self.doc_types
    }

    /// `{Y-3, Y-2, Y-1}`.
    pub fn cited_window(&self) -> RangeInclusive<Year> {
        self.year - CITED_WINDOW_YEARS..=self.year - 1
    }

    /// `{Y-8, ..., Y-1}`.
    pub fn extended_window(&self) -> RangeInclusive<Year> {
        self.year - EXTENDED_WINDOW_YEARS..=self.year - 1
    }

    pub fn num_journals(&self) -> usize {
        self.journals.len()
    }

    pub fn num_publications(&self) -> usize {
        self.publications.len()
    }

    pub fn total_references(&self) -> usize {
        self.publications.iter().map(|p| p.references.len()).sum()
    }

    pub fn journals(&self) -> &[Journal] {
        &self.journals
    }

    pub fn journal(&self, idx: JournalIdx) -> &Journal {
        &self.journals[idx.index()]
    }

    pub fn journal_indices(&self) -> impl Iterator<Item = JournalIdx> + '_ {
        (0..self.journals.len() as u32).map(JournalIdx)
    }

    pub fn journal_idx(&self, id: &str) -> Option<JournalIdx> {
        self.journal_lookup.get(id).copied()
    }

    pub fn require_journal(&self, id: &str) -> Result<JournalIdx> {
        self.journal_idx(id)
            .ok_or_else(|| Error::UnknownJournal(id.to_owned()))
    }

    pub fn publications(&self) -> &[Publication] {
        &self.publications
    }

    pub fn publication(&self, idx: PubIdx) -> &Publication {
        &self.publications[idx.index()]
    }

    pub fn pub_idx(&self, id: &str) -> Option<PubIdx> {
        self.pub_lookup.get(id).copied()
    }

    /// Publications of `journal` in `year`, sorted by index.
    pub fn pubs_of(&self, journal: JournalIdx, year: Year) -> &[PubIdx] {
        self.by_journal_year[journal.index()]
            .get(&year)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn pubs_by_year(&self, journal: JournalIdx) -> &BTreeMap<Year, Vec<PubIdx>> {
        &self.by_journal_year[journal.index()]
    }

    /// Publications of `journal` in the three-year cited window.
    pub fn window_pubs(&self, journal: JournalIdx) -> impl Iterator<Item = PubIdx> + '_ {
        self.by_journal_year[journal.index()]
            .range(self.cited_window())
            .flat_map(|(_, v)| v.iter().copied())
    }

    /// `m`: number of publications in the cited window.
    pub fn window_count(&self, journal: JournalIdx) -> usize {
        self.by_journal_year[journal.index()]
            .range(self.cited_window())
            .map(|(_, v)| v.len())
            .sum()
    }

    pub fn in_cited_window(&self, year: Year) -> bool {
        self.cited_window().contains(&year)
    }

    /// Publications of the year of analysis that reference `target`.
    pub fn citing_pubs_of(&self, target: PubIdx) -> &[PubIdx] {
        &self.cited_by[target.index()]
    }

    /// One event per (citing publication, reference) pair where the citing
    /// publication appeared in the year of analysis in a journal of `from`
    /// and the reference targets a cited-window publication of `journal`.
    pub fn citations_received(
        &self,
        journal: &str,
        from: &JournalSet,
    ) -> Result<Vec<CitationEvent>> {
        let j = self.require_journal(journal)?;
        Ok(self.citation_events(j, from))
    }

    /// Index-based variant of [`Corpus::citations_received`].
    pub fn citation_events(&self, journal: JournalIdx, from: &JournalSet) -> Vec<CitationEvent> {
        let mut events: Vec<CitationEvent> = self
            .window_pubs(journal)
            .flat_map(|cited| {
                self.cited_by[cited.index()]
                    .iter()
                    .filter(|c| from.contains(self.publications[c.index()].journal))
                    .map(move |&citing| CitationEvent { citing, cited })
            })
            .collect();
        events.sort_unstable();
        events
    }

    /// SHA-256 over a canonical, order-independent serialization.
    pub fn canonical_hash(&self) -> String {
        let mut h = Sha256::new();
        let mut put = |bytes: &[u8]| {
            h.update((bytes.len() as u64).to_le_bytes());
            h.update(bytes);
        };
        put(&self.year.to_le_bytes());
        for d in &self.doc_types {
            put(d.as_str().as_bytes());
        }
        put(&(self.journals.len() as u64).to_le_bytes());
        for j in &self.journals {
            put(j.id.as_str().as_bytes());
            put(&[j.is_trade as u8]);
            put(&(j.titles.len() as u64).to_le_bytes());
            for t in &j.titles {
                put(t.as_bytes());
            }
            put(&(j.predecessor_ids.len() as u64).to_le_bytes());
            for p in &j.predecessor_ids {
                put(p.as_str().as_bytes());
            }
        }
        put(&(self.publications.len() as u64).to_le_bytes());
        for p in &self.publications {
            put(p.id.as_str().as_bytes());
            put(self.journals[p.journal.index()].id.as_str().as_bytes());
            put(&p.year.to_le_bytes());
            put(p.doc_type.as_str().as_bytes());
            put(&p.raw_reference_count.to_le_bytes());
            put(&(p.references.len() as u64).to_le_bytes());
            for r in &p.references {
                put(self.publications[r.index()].id.as_str().as_bytes());
            }
        }
        hex::encode(h.finalize())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn doc_type_normalization() {
        assert_eq!(DocType::new("Conference Paper"), DocType::new("conference_paper"));
        assert_eq!(DocType::new("  Review "), DocType::new("review"));
        assert_eq!(DocType::new("short-survey").as_str(), "short_survey");
        assert!(!DocType::default_allowlist().contains(&DocType::new("editorial")));
    }

    #[test]
    fn windows() {
        let c = Corpus::empty(2010);
        assert_eq!(c.cited_window(), 2007..=2009);
        assert_eq!(c.extended_window(), 2002..=2009);
    }
}
