use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, JournalId, JournalSet};
use crate::error::{Error, Result};
use crate::exact::{self, Ratio};
use crate::indicators::{build_table, IndicatorMode};

/// Field-level aggregates of the revised indicator.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldMu {
    pub field: usize,
    /// Journals with cited-window publications.
    pub cited_journals: usize,
    /// Journals in the citing set with year-of-analysis publications.
    pub citing_journals: usize,
    /// Cited-window publications of the cited journals.
    pub m1: u64,
    /// Year-of-analysis publications of the citing journals.
    pub m2: u64,
    /// Cited-window-weighted mean score of the cited journals.
    pub mu: Option<Ratio>,
    /// `3 * m2 / m1`.
    pub expected: Option<Ratio>,
    /// The same weighted mean taken over the citing journals only.
    pub citing_weighted_mean: Option<Ratio>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldMuDocument {
    pub field: usize,
    pub name: String,
    pub cited_journals: usize,
    pub citing_journals: usize,
    pub m1: u64,
    pub m2: u64,
    pub mu: Option<f64>,
    /// Exact value as `numer/denom`.
    pub mu_exact: Option<String>,
    pub expected: Option<f64>,
    pub citing_weighted_mean: Option<f64>,
}

impl FieldMu {
    pub fn document(&self, name: &str) -> FieldMuDocument {
        let f = |r: &Option<Ratio>| r.as_ref().map(exact::to_f64);
        FieldMuDocument {
            field: self.field,
            name: name.to_owned(),
            cited_journals: self.cited_journals,
            citing_journals: self.citing_journals,
            m1: self.m1,
            m2: self.m2,
            mu: f(&self.mu),
            mu_exact: self.mu.as_ref().map(|r| r.to_string()),
            expected: f(&self.expected),
            citing_weighted_mean: f(&self.citing_weighted_mean),
        }
    }
}

/// Per-field weighted mean revised score of the cited journals, with the
/// counts needed to predict it. Every journal that publishes in the cited
/// window or cites in the year of analysis must be assigned a field.
pub fn mu_per_field(
    corpus: &Corpus,
    citing: &JournalSet,
    field_of: &BTreeMap<JournalId, usize>,
) -> Result<Vec<FieldMu>> {
    let year = corpus.year();
    let n_fields = field_of.values().max().map_or(0, |&f| f + 1);
    let mut out: Vec<FieldMu> = (0..n_fields)
        .map(|field| FieldMu {
            field,
            cited_journals: 0,
            citing_journals: 0,
            m1: 0,
            m2: 0,
            mu: None,
            expected: None,
            citing_weighted_mean: None,
        })
        .collect();

    let mut field_idx = vec![None; corpus.num_journals()];
    for j in corpus.journal_indices() {
        let cites = citing.contains(j) && !corpus.pubs_of(j, year).is_empty();
        let cited = corpus.window_count(j) > 0;
        if !cites && !cited {
            continue;
        }
        let id = &corpus.journal(j).id;
        let &f = field_of
            .get(id)
            .ok_or_else(|| Error::UnassignedJournal(id.to_string()))?;
        field_idx[j.index()] = Some(f);
        if cited {
            out[f].cited_journals += 1;
            out[f].m1 += corpus.window_count(j) as u64;
        }
        if cites {
            out[f].citing_journals += 1;
            out[f].m2 += corpus.pubs_of(j, year).len() as u64;
        }
    }

    let table = build_table(corpus, IndicatorMode::SnipRevised, citing, 0)?;
    let mut sums = vec![(Ratio::zero(), 0u64, Ratio::zero(), 0u64); n_fields];
    for s in &table.scores {
        let j = corpus.require_journal(s.journal.as_str())?;
        let (Some(f), Some(snip)) = (field_idx[j.index()], &s.snip) else {
            continue;
        };
        let weighted = snip * exact::integer(s.m);
        sums[f].0 += &weighted;
        sums[f].1 += s.m;
        if citing.contains(j) && !corpus.pubs_of(j, year).is_empty() {
            sums[f].2 += weighted;
            sums[f].3 += s.m;
        }
    }
    for (fm, (num, den, cnum, cden)) in out.iter_mut().zip(sums) {
        fm.mu = (den > 0).then(|| num / exact::integer(den));
        fm.citing_weighted_mean = (cden > 0).then(|| cnum / exact::integer(cden));
        fm.expected = (fm.m1 > 0).then(|| exact::ratio(3 * fm.m2, fm.m1));
    }
    Ok(out)
}

/// Revised score of one journal recomputed by walking every reference of
/// every year-of-analysis publication, in floating point.
///
/// Only the raw corpus accessors are used, so it can serve as an
/// independent check of the indicator code. `None` when the journal has no
/// cited-window publication.
pub fn brute_force_snip(corpus: &Corpus, citing: &JournalSet, journal: &str) -> Result<Option<f64>> {
    let target = corpus.require_journal(journal)?;
    let year = corpus.year();
    let pubs = corpus.publications();
    let in_window = |y: i32| y < year && y >= year - 3;

    let active = |refs: &[crate::corpus::PubIdx]| {
        refs.iter()
            .filter(|t| {
                let cited = &pubs[t.index()];
                in_window(cited.year) && citing.contains(cited.journal)
            })
            .count()
    };

    let mut cohort_total = vec![0usize; corpus.num_journals()];
    let mut cohort_active = vec![0usize; corpus.num_journals()];
    for p in pubs.iter().filter(|p| p.year == year) {
        cohort_total[p.journal.index()] += 1;
        if active(&p.references) > 0 {
            cohort_active[p.journal.index()] += 1;
        }
    }

    let m = pubs
        .iter()
        .filter(|p| p.journal == target && in_window(p.year))
        .count();
    if m == 0 {
        return Ok(None);
    }

    let mut sum = 0.0;
    for p in pubs.iter().filter(|p| p.year == year && citing.contains(p.journal)) {
        let r = active(&p.references);
        if r == 0 {
            continue;
        }
        let share = cohort_active[p.journal.index()] as f64 / cohort_total[p.journal.index()] as f64;
        for t in &p.references {
            let cited = &pubs[t.index()];
            if cited.journal == target && in_window(cited.year) {
                sum += 1.0 / (share * r as f64);
            }
        }
    }
    Ok(Some(3.0 * sum / m as f64))
}
