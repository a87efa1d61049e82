//! Title-change merging: publications of a predecessor journal are
//! re-attributed to its successor and the predecessor disappears.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;

use super::{Corpus, Journal, JournalId, JournalIdx, RecordError};
use crate::error::{Error, Result};

/// `old_journal_id -> new_journal_id`. Chains are resolved transitively.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MergeMap(BTreeMap<JournalId, JournalId>);

impl MergeMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, old: impl Into<JournalId>, new: impl Into<JournalId>) {
        self.0.insert(old.into(), new.into());
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&JournalId, &JournalId)> {
        self.0.iter()
    }

    /// Final successor of every key, or the first cycle found.
    fn resolve(&self) -> Result<BTreeMap<&JournalId, &JournalId>> {
        let mut roots = BTreeMap::new();
        for start in self.0.keys() {
            let mut path = vec![start];
            let mut cur = start;
            while let Some(next) = self.0.get(cur) {
                if let Some(pos) = path.iter().position(|p| *p == next) {
                    let mut cycle: Vec<String> =
                        path[pos..].iter().map(|j| j.0.clone()).collect();
                    cycle.push(next.0.clone());
                    return Err(Error::MergeCycle(cycle));
                }
                path.push(next);
                cur = next;
            }
            roots.insert(start, cur);
        }
        Ok(roots)
    }
}

impl<A: Into<JournalId>, B: Into<JournalId>> FromIterator<(A, B)> for MergeMap {
    fn from_iter<I: IntoIterator<Item = (A, B)>>(iter: I) -> Self {
        MergeMap(iter.into_iter().map(|(a, b)| (a.into(), b.into())).collect())
    }
}

/// Reads `merges.csv` (`old_journal_id,new_journal_id`).
pub fn read_merge_map(input: impl Read) -> Result<(MergeMap, Vec<RecordError>)> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(input);
    let headers = reader.headers()?.clone();
    let old_col = headers.iter().position(|h| h == "old_journal_id");
    let new_col = headers.iter().position(|h| h == "new_journal_id");
    let (Some(old_col), Some(new_col)) = (old_col, new_col) else {
        return Err(Error::InvalidValue(
            "merges.csv: header must contain old_journal_id,new_journal_id".into(),
        ));
    };
    let mut map = MergeMap::new();
    let mut errors = Vec::new();
    for row in reader.records() {
        let row = match row {
            Ok(r) => r,
            Err(e) => {
                errors.push(RecordError {
                    source: "merges.csv".into(),
                    line: e.position().map(|p| p.line()).unwrap_or(0),
                    message: e.to_string(),
                });
                continue;
            }
        };
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        match (row.get(old_col), row.get(new_col)) {
            (Some(old), Some(new)) if !old.is_empty() && !new.is_empty() => {
                map.insert(old, new);
            }
            _ => errors.push(RecordError {
                source: "merges.csv".into(),
                line,
                message: "expected non-empty old_journal_id and new_journal_id".into(),
            }),
        }
    }
    Ok((map, errors))
}

/// Entries whose old journal is not in the corpus are ignored; an entry whose
/// old journal is present but whose final successor is not is an error.
pub fn merge_title_changes(corpus: &Corpus, merges: &MergeMap) -> Result<Corpus> {
    let roots = merges.resolve()?;
    if roots.is_empty() {
        return Ok(corpus.clone());
    }

    // successor index for every journal (itself when not merged away)
    let mut successor: Vec<JournalIdx> = corpus.journal_indices().collect();
    let mut absorbed: BTreeMap<JournalIdx, BTreeSet<JournalIdx>> = BTreeMap::new();
    for (old, root) in &roots {
        let Some(old_idx) = corpus.journal_idx(old.as_str()) else {
            continue;
        };
        let root_idx =
            corpus
                .journal_idx(root.as_str())
                .ok_or_else(|| Error::UnknownMergeTarget {
                    source_id: old.0.clone(),
                    target: root.0.clone(),
                })?;
        successor[old_idx.index()] = root_idx;
        absorbed.entry(root_idx).or_default().insert(old_idx);
    }

    let mut remap: Vec<Option<JournalIdx>> = vec![None; corpus.num_journals()];
    let mut journals: Vec<Journal> = Vec::new();
    for j in corpus.journal_indices() {
        if successor[j.index()] != j {
            continue;
        }
        remap[j.index()] = Some(JournalIdx(journals.len() as u32));
        let base = corpus.journal(j);
        let mut merged = base.clone();
        let mut preds: BTreeSet<JournalId> = base.predecessor_ids.iter().cloned().collect();
        for &p in absorbed.get(&j).into_iter().flatten() {
            let pj = corpus.journal(p);
            preds.insert(pj.id.clone());
            preds.extend(pj.predecessor_ids.iter().cloned());
            for t in &pj.titles {
                if !merged.titles.contains(t) {
                    merged.titles.push(t.clone());
                }
            }
        }
        merged.predecessor_ids = preds.into_iter().collect();
        journals.push(merged);
    }

    let publications = corpus
        .publications()
        .iter()
        .map(|p| {
            let mut p = p.clone();
            let root = successor[p.journal.index()];
            p.journal = remap[root.index()].expect("successor survives the merge");
            p
        })
        .collect();

    Ok(Corpus::from_parts(
        corpus.year(),
        corpus.doc_types().clone(),
        journals,
        publications,
    ))
}
