use super::{Corpus, JournalId, JournalIdx};
use crate::error::Result;

/// Membership mask over the journals of one corpus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JournalSet {
    members: Vec<bool>,
    len: usize,
}

impl JournalSet {
    pub fn empty(corpus: &Corpus) -> Self {
        JournalSet {
            members: vec![false; corpus.num_journals()],
            len: 0,
        }
    }

    pub fn all(corpus: &Corpus) -> Self {
        JournalSet {
            members: vec![true; corpus.num_journals()],
            len: corpus.num_journals(),
        }
    }

    pub fn from_indices(corpus: &Corpus, indices: impl IntoIterator<Item = JournalIdx>) -> Self {
        let mut set = Self::empty(corpus);
        for j in indices {
            set.insert(j);
        }
        set
    }

    /// Unknown ids are an error; a set naming journals that are not in the
    /// corpus was built against a different corpus.
    pub fn from_ids<'a>(
        corpus: &Corpus,
        ids: impl IntoIterator<Item = &'a JournalId>,
    ) -> Result<Self> {
        let mut set = Self::empty(corpus);
        for id in ids {
            set.insert(corpus.require_journal(id.as_str())?);
        }
        Ok(set)
    }

    #[inline]
    pub fn contains(&self, j: JournalIdx) -> bool {
        self.members.get(j.index()).copied().unwrap_or(false)
    }

    pub fn insert(&mut self, j: JournalIdx) -> bool {
        let slot = &mut self.members[j.index()];
        let added = !*slot;
        *slot = true;
        self.len += added as usize;
        added
    }

    pub fn remove(&mut self, j: JournalIdx) -> bool {
        let slot = &mut self.members[j.index()];
        let removed = *slot;
        *slot = false;
        self.len -= removed as usize;
        removed
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = JournalIdx> + '_ {
        self.members
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(|(i, _)| JournalIdx(i as u32))
    }

    pub fn ids(&self, corpus: &Corpus) -> Vec<JournalId> {
        self.iter().map(|j| corpus.journal(j).id.clone()).collect()
    }

    pub fn is_subset(&self, other: &JournalSet) -> bool {
        self.iter().all(|j| other.contains(j))
    }
}
