//! Columnar on-disk snapshot of a built corpus (bincode encoded).

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Corpus, DocType, Journal, JournalId, JournalIdx, PubId, PubIdx, Publication, Year};
use crate::error::{Error, Result};

const MAGIC: &str = "snip-corpus";
const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusSnapshot {
    magic: String,
    version: u32,
    year: Year,
    doc_types: Vec<String>,

    journal_ids: Vec<String>,
    journal_is_trade: Vec<bool>,
    journal_titles: Vec<Vec<String>>,
    journal_predecessors: Vec<Vec<String>>,

    pub_ids: Vec<String>,
    pub_journal: Vec<u32>,
    pub_year: Vec<Year>,
    pub_doc_type: Vec<u16>,
    pub_raw_reference_count: Vec<u32>,
    /// CSR layout: references of publication `i` are
    /// `ref_targets[ref_offsets[i]..ref_offsets[i + 1]]`.
    ref_offsets: Vec<u64>,
    ref_targets: Vec<u32>,
}

impl Corpus {
    pub fn to_snapshot(&self) -> CorpusSnapshot {
        let doc_types: Vec<String> = self.doc_types.iter().map(|d| d.0.clone()).collect();
        let mut pub_doc_type = Vec::with_capacity(self.publications.len());
        let mut ref_offsets = Vec::with_capacity(self.publications.len() + 1);
        let mut ref_targets = Vec::with_capacity(self.total_references());
        ref_offsets.push(0u64);
        for p in &self.publications {
            let code = doc_types
                .iter()
                .position(|d| *d == p.doc_type.0)
                .expect("publication doc types are in the allowlist");
            pub_doc_type.push(code as u16);
            ref_targets.extend(p.references.iter().map(|r| r.0));
            ref_offsets.push(ref_targets.len() as u64);
        }
        CorpusSnapshot {
            magic: MAGIC.into(),
            version: FORMAT_VERSION,
            year: self.year,
            journal_ids: self.journals.iter().map(|j| j.id.0.clone()).collect(),
            journal_is_trade: self.journals.iter().map(|j| j.is_trade).collect(),
            journal_titles: self.journals.iter().map(|j| j.titles.clone()).collect(),
            journal_predecessors: self
                .journals
                .iter()
                .map(|j| j.predecessor_ids.iter().map(|p| p.0.clone()).collect())
                .collect(),
            pub_ids: self.publications.iter().map(|p| p.id.0.clone()).collect(),
            pub_journal: self.publications.iter().map(|p| p.journal.0).collect(),
            pub_year: self.publications.iter().map(|p| p.year).collect(),
            pub_raw_reference_count: self
                .publications
                .iter()
                .map(|p| p.raw_reference_count)
                .collect(),
            doc_types,
            pub_doc_type,
            ref_offsets,
            ref_targets,
        }
    }

    pub fn from_snapshot(s: CorpusSnapshot) -> Result<Corpus> {
        let bad = |msg: &str| Error::CorruptCache(msg.to_owned());
        if s.magic != MAGIC || s.version != FORMAT_VERSION {
            return Err(bad("unrecognized header"));
        }
        let nj = s.journal_ids.len();
        let np = s.pub_ids.len();
        if s.journal_is_trade.len() != nj
            || s.journal_titles.len() != nj
            || s.journal_predecessors.len() != nj
            || s.pub_journal.len() != np
            || s.pub_year.len() != np
            || s.pub_doc_type.len() != np
            || s.pub_raw_reference_count.len() != np
            || s.ref_offsets.len() != np + 1
        {
            return Err(bad("column lengths disagree"));
        }
        if !s.journal_ids.windows(2).all(|w| w[0] < w[1])
            || !s.pub_ids.windows(2).all(|w| w[0] < w[1])
        {
            return Err(bad("ids are not strictly sorted"));
        }
        if s.ref_offsets[0] != 0
            || !s.ref_offsets.windows(2).all(|w| w[0] <= w[1])
            || s.ref_offsets[np] as usize != s.ref_targets.len()
        {
            return Err(bad("reference offsets are inconsistent"));
        }

        let doc_types: Vec<DocType> = s.doc_types.iter().map(|d| DocType(d.clone())).collect();
        let journals = s
            .journal_ids
            .into_iter()
            .zip(s.journal_is_trade)
            .zip(s.journal_titles)
            .zip(s.journal_predecessors)
            .map(|(((id, is_trade), titles), preds)| Journal {
                id: JournalId(id),
                titles,
                is_trade,
                predecessor_ids: preds.into_iter().map(JournalId).collect(),
            })
            .collect();

        let mut publications = Vec::with_capacity(np);
        for (i, id) in s.pub_ids.into_iter().enumerate() {
            let journal = s.pub_journal[i];
            if journal as usize >= nj {
                return Err(bad("journal index out of range"));
            }
            let doc_type = doc_types
                .get(s.pub_doc_type[i] as usize)
                .cloned()
                .ok_or_else(|| bad("doc type code out of range"))?;
            let refs = &s.ref_targets[s.ref_offsets[i] as usize..s.ref_offsets[i + 1] as usize];
            if refs.iter().any(|&r| r as usize >= np) {
                return Err(bad("reference target out of range"));
            }
            publications.push(Publication {
                id: PubId(id),
                journal: JournalIdx(journal),
                year: s.pub_year[i],
                doc_type,
                references: refs.iter().map(|&r| PubIdx(r)).collect(),
                raw_reference_count: s.pub_raw_reference_count[i],
            });
        }

        let doc_types: BTreeSet<DocType> = doc_types.into_iter().collect();
        Ok(Corpus::from_parts(s.year, doc_types, journals, publications))
    }

    pub fn write_cache(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        bincode::serialize_into(BufWriter::new(file), &self.to_snapshot())?;
        Ok(())
    }

    pub fn to_cache_bytes(&self) -> Result<Vec<u8>> {
        Ok(bincode::serialize(&self.to_snapshot())?)
    }

    pub fn from_cache_bytes(bytes: &[u8]) -> Result<Corpus> {
        Corpus::from_snapshot(bincode::deserialize(bytes)?)
    }

    pub fn read_cache(path: &Path) -> Result<Corpus> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let snapshot: CorpusSnapshot = bincode::deserialize_from(BufReader::new(file))?;
        Corpus::from_snapshot(snapshot)
    }
}
