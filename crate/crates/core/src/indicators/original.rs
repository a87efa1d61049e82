use std::collections::BTreeSet;

use rayon::prelude::*;

use super::{CitingContext, JournalScore, SubjectFieldEntry};
use crate::corpus::{Corpus, JournalIdx, JournalSet};
use crate::error::{Error, Result};
use crate::exact::{self, Ratio};
use num_traits::Zero;

/// Citations per cited-window publication, counting only citations from
/// journals in `citing`. `None` when the journal has no window publication.
pub fn rip(corpus: &Corpus, citing: &JournalSet, journal: &str) -> Result<Option<Ratio>> {
    let j = corpus.require_journal(journal)?;
    let m = corpus.window_count(j) as u64;
    if m == 0 {
        return Ok(None);
    }
    let n = corpus.citation_events(j, citing).len() as u64;
    Ok(Some(exact::ratio(n, m)))
}

/// Distinct year-of-analysis publications (from `universe` journals) citing
/// the journal anywhere in the eight preceding years. `r` counts references
/// into the three-year window at `universe` journals.
pub fn subject_field_original(
    corpus: &Corpus,
    universe: &JournalSet,
    journal: &str,
) -> Result<Vec<SubjectFieldEntry>> {
    let j = corpus.require_journal(journal)?;
    let ctx = CitingContext::new(corpus, universe);
    Ok(subject_field(&ctx, j))
}

pub(crate) fn subject_field(ctx: &CitingContext<'_>, j: JournalIdx) -> Vec<SubjectFieldEntry> {
    let corpus = ctx.corpus();
    let citing: BTreeSet<_> = corpus
        .pubs_by_year(j)
        .range(corpus.extended_window())
        .flat_map(|(_, pubs)| pubs.iter())
        .flat_map(|&cited| corpus.citing_pubs_of(cited).iter().copied())
        .filter(|&c| ctx.citing().contains(corpus.publication(c).journal))
        .collect();
    citing
        .into_iter()
        .map(|c| SubjectFieldEntry {
            citing: c,
            r: ctx.active_refs(c),
            p: None,
            multiplicity: 1,
        })
        .collect()
}

/// Arithmetic mean of `r`; `None` for an empty subject field.
pub fn dcp_original(entries: &[SubjectFieldEntry]) -> Option<Ratio> {
    if entries.is_empty() {
        return None;
    }
    let total: u64 = entries.iter().map(|e| e.r).sum();
    Some(exact::ratio(total, entries.len() as u64))
}

/// Median original DCP over every journal with a non-empty subject field.
pub fn median_dcp(corpus: &Corpus, universe: &JournalSet) -> Option<Ratio> {
    let ctx = CitingContext::new(corpus, universe);
    median_from_context(&ctx)
}

pub(crate) fn median_from_context(ctx: &CitingContext<'_>) -> Option<Ratio> {
    let corpus = ctx.corpus();
    let journals: Vec<JournalIdx> = corpus.journal_indices().collect();
    let mut dcps: Vec<Ratio> = journals
        .par_iter()
        .filter_map(|&j| dcp_original(&subject_field(ctx, j)))
        .collect();
    exact::median(&mut dcps)
}

/// Original SNIP for one journal; the database median is computed here,
/// so prefer [`super::build_table`] when scoring many journals.
pub fn snip_original(corpus: &Corpus, universe: &JournalSet, journal: &str) -> Result<JournalScore> {
    let j = corpus.require_journal(journal)?;
    let ctx = CitingContext::new(corpus, universe);
    let median = median_from_context(&ctx).ok_or(Error::ZeroMedianDcp)?;
    score(&ctx, j, &median)
}

/// Original SNIP against a given median DCP.
pub fn snip_original_with_median(
    corpus: &Corpus,
    universe: &JournalSet,
    journal: &str,
    median: &Ratio,
) -> Result<JournalScore> {
    let j = corpus.require_journal(journal)?;
    let ctx = CitingContext::new(corpus, universe);
    score(&ctx, j, median)
}

pub(crate) fn score(ctx: &CitingContext<'_>, j: JournalIdx, median: &Ratio) -> Result<JournalScore> {
    if median.is_zero() {
        return Err(Error::ZeroMedianDcp);
    }
    let corpus = ctx.corpus();
    let mut s = JournalScore::undefined(corpus.journal(j).id.clone());
    s.m = corpus.window_count(j) as u64;
    s.n = corpus.citation_events(j, ctx.citing()).len() as u64;
    s.dcp = dcp_original(&subject_field(ctx, j));
    s.rdcp = s.dcp.as_ref().map(|d| d / median);
    if s.m == 0 {
        return Ok(s);
    }
    let rip = exact::ratio(s.n, s.m);
    s.snip = if s.n == 0 {
        Some(Ratio::zero())
    } else {
        s.rdcp
            .as_ref()
            .filter(|r| !r.is_zero())
            .map(|rdcp| &rip / rdcp)
    };
    s.rip = Some(rip);
    Ok(s)
}
