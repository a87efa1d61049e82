use num_bigint::BigInt;
use num_traits::Zero;

use super::{CitingContext, CohortShare, JournalScore, SubjectFieldEntry};
use crate::corpus::{Corpus, JournalIdx, JournalSet, Year};
use crate::error::{Error, Result};
use crate::exact::{self, FractionSum, Ratio};
use crate::selection::active_reference_count;

/// Multiset subject field of the revised indicator.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RevisedSubjectField {
    /// One entry per citing publication; `multiplicity` holds the number of
    /// its references into the journal's cited window.
    pub entries: Vec<SubjectFieldEntry>,
    /// Citation events from citing publications with no active reference.
    /// They are excluded from both `n` and the DCP sum.
    pub zero_active_dropped: u64,
}

impl RevisedSubjectField {
    /// `n`: citation events retained in the subject field.
    pub fn citations(&self) -> u64 {
        self.entries.iter().map(|e| e.multiplicity).sum()
    }
}

/// Fraction of the `(journal, year)` cohort with at least one active
/// reference against `citing`.
pub fn cohort_active_share(
    corpus: &Corpus,
    citing: &JournalSet,
    journal: &str,
    year: Year,
) -> Result<CohortShare> {
    let j = corpus.require_journal(journal)?;
    let cohort = corpus.pubs_of(j, year);
    if cohort.is_empty() {
        return Err(Error::EmptyCohort {
            journal: journal.to_owned(),
            year,
        });
    }
    let active = cohort
        .iter()
        .filter(|&&p| active_reference_count(corpus, p, citing) > 0)
        .count() as u64;
    Ok(CohortShare {
        active,
        total: cohort.len() as u64,
    })
}

pub fn subject_field_revised(
    corpus: &Corpus,
    citing: &JournalSet,
    journal: &str,
) -> Result<RevisedSubjectField> {
    let j = corpus.require_journal(journal)?;
    let ctx = CitingContext::new(corpus, citing);
    Ok(subject_field(&ctx, j))
}

pub(crate) fn subject_field(ctx: &CitingContext<'_>, j: JournalIdx) -> RevisedSubjectField {
    let corpus = ctx.corpus();
    let events = corpus.citation_events(j, ctx.citing());
    let mut field = RevisedSubjectField::default();
    // events are sorted by citing publication, so equal citers are adjacent
    for group in events.chunk_by(|a, b| a.citing == b.citing) {
        let citing = group[0].citing;
        let multiplicity = group.len() as u64;
        let r = ctx.active_refs(citing);
        if r == 0 {
            field.zero_active_dropped += multiplicity;
            continue;
        }
        let p = ctx
            .cohort(corpus.publication(citing).journal)
            .expect("citing publication belongs to a non-empty cohort");
        field.entries.push(SubjectFieldEntry {
            citing,
            r,
            p: Some(p),
            multiplicity,
        });
    }
    field
}

/// `sum(multiplicity / (p * r))`. Entries without `p` count as `p = 1`.
pub(crate) fn inverse_pr_sum(entries: &[SubjectFieldEntry]) -> Ratio {
    let mut sum = FractionSum::new();
    for e in entries {
        assert!(e.r > 0, "revised subject field entries need r >= 1");
        let p = e.p.unwrap_or(CohortShare { active: 1, total: 1 });
        assert!(p.active > 0, "revised subject field entries need p > 0");
        sum.add(e.multiplicity * p.total, p.active * e.r);
    }
    sum.total()
}

/// One third of the multiplicity-weighted harmonic mean of `p * r`.
pub fn dcp_revised(entries: &[SubjectFieldEntry]) -> Option<Ratio> {
    let n: u64 = entries.iter().map(|e| e.multiplicity).sum();
    if n == 0 {
        return None;
    }
    let harmonic = exact::integer(n) / inverse_pr_sum(entries);
    Some(harmonic / BigInt::from(3))
}

/// `RIP / DCP` for a journal with `m` window publications and the given
/// retained subject field: `None` when `m = 0`, zero when nothing cites it.
pub fn snip_from_entries(m: u64, entries: &[SubjectFieldEntry]) -> Option<Ratio> {
    if m == 0 {
        return None;
    }
    let n: u64 = entries.iter().map(|e| e.multiplicity).sum();
    if n == 0 {
        return Some(Ratio::zero());
    }
    let rip = exact::ratio(n, m);
    let dcp = dcp_revised(entries)?;
    Some(rip / dcp)
}

pub fn snip_revised(corpus: &Corpus, citing: &JournalSet, journal: &str) -> Result<JournalScore> {
    let j = corpus.require_journal(journal)?;
    let ctx = CitingContext::new(corpus, citing);
    Ok(score(&ctx, j))
}

/// Revised SNIP written as a weighted citation count:
/// `(3 / m) * sum(multiplicity / (p * r))`.
pub fn snip_revised_a2(corpus: &Corpus, citing: &JournalSet, journal: &str) -> Result<Option<Ratio>> {
    let j = corpus.require_journal(journal)?;
    let ctx = CitingContext::new(corpus, citing);
    let m = corpus.window_count(j) as u64;
    if m == 0 {
        return Ok(None);
    }
    let field = subject_field(&ctx, j);
    Ok(Some(inverse_pr_sum(&field.entries) * exact::ratio(3, m)))
}

pub(crate) fn score(ctx: &CitingContext<'_>, j: JournalIdx) -> JournalScore {
    let corpus = ctx.corpus();
    let mut s = JournalScore::undefined(corpus.journal(j).id.clone());
    s.m = corpus.window_count(j) as u64;
    let field = subject_field(ctx, j);
    s.n = field.citations();
    s.flags.zero_active_dropped = field.zero_active_dropped;
    s.dcp = dcp_revised(&field.entries);
    if s.m > 0 {
        s.rip = Some(exact::ratio(s.n, s.m));
        s.snip = snip_from_entries(s.m, &field.entries);
    }
    s
}
