//! Citing-journal selection.
//!
//! Journals publishing in the year of analysis are excluded as citing
//! journals in three steps: trade journals, journals without publications in
//! each of the four years `Y-3..=Y`, and journals where fewer than
//! `threshold` of the year-`Y` publications have an active reference. An
//! active reference points into the cited window *and* at a journal that is
//! itself a citing journal, so step three is iterated until the included set
//! stops changing. Iteration starts from every step-two survivor and only
//! ever removes journals, which reaches the greatest fixed point in at most
//! `|journals|` rounds.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, JournalId, JournalIdx, JournalSet, PubIdx, Year};
use crate::error::{Error, Result};

pub const DEFAULT_THRESHOLD: f64 = 0.20;
pub const DEFAULT_MAX_ITERATIONS: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExclusionReason {
    Trade,
    NotContinuous,
    BelowActiveThreshold,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SelectionConfig {
    pub threshold: f64,
    pub max_iterations: usize,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        SelectionConfig {
            threshold: DEFAULT_THRESHOLD,
            max_iterations: DEFAULT_MAX_ITERATIONS,
        }
    }
}

/// Outcome of [`select_citing_journals`].
#[derive(Clone, Debug, PartialEq)]
pub struct CitingJournalSet {
    pub year: Year,
    pub threshold: f64,
    pub included: JournalSet,
    pub excluded: BTreeMap<JournalIdx, ExclusionReason>,
    /// Round in which each step-three exclusion happened (1-based).
    pub exclusion_round: BTreeMap<JournalIdx, usize>,
    /// Rounds evaluated, including the final round that changed nothing.
    pub iterations: usize,
    /// Active share of every step-three candidate, measured against the
    /// final included set.
    pub active_share: BTreeMap<JournalIdx, f64>,
}

/// Serialized form (`selection.json`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectionDocument {
    pub year: Year,
    pub threshold: f64,
    pub iterations: usize,
    pub included: Vec<JournalId>,
    pub excluded: BTreeMap<JournalId, ExclusionReason>,
    pub active_share: BTreeMap<JournalId, f64>,
    #[serde(default)]
    pub exclusion_round: BTreeMap<JournalId, usize>,
}

impl CitingJournalSet {
    pub fn document(&self, corpus: &Corpus) -> SelectionDocument {
        let id = |j: &JournalIdx| corpus.journal(*j).id.clone();
        SelectionDocument {
            year: self.year,
            threshold: self.threshold,
            iterations: self.iterations,
            included: self.included.ids(corpus),
            excluded: self.excluded.iter().map(|(j, r)| (id(j), *r)).collect(),
            active_share: self.active_share.iter().map(|(j, s)| (id(j), *s)).collect(),
            exclusion_round: self.exclusion_round.iter().map(|(j, r)| (id(j), *r)).collect(),
        }
    }

    /// Re-runs one selection round against the returned set; `true` when
    /// no journal would change membership.
    pub fn is_fixed_point(&self, corpus: &Corpus) -> bool {
        let candidates: Vec<JournalIdx> = self
            .included
            .iter()
            .chain(
                self.excluded
                    .iter()
                    .filter(|(_, r)| **r == ExclusionReason::BelowActiveThreshold)
                    .map(|(j, _)| *j),
            )
            .collect();
        candidates.into_par_iter().all(|j| {
            let passes = passes_threshold(corpus, j, &self.included, self.threshold);
            passes == self.included.contains(j)
        })
    }
}

impl SelectionDocument {
    pub fn citing_set(&self, corpus: &Corpus) -> Result<JournalSet> {
        JournalSet::from_ids(corpus, &self.included)
    }
}

/// Journals with at least one publication in the year of analysis.
pub fn selection_universe(corpus: &Corpus) -> Vec<JournalIdx> {
    corpus
        .journal_indices()
        .filter(|&j| !corpus.pubs_of(j, corpus.year()).is_empty())
        .collect()
}

/// Step one: trade journals publishing in the year of analysis.
pub fn exclude_trade(corpus: &Corpus) -> Vec<JournalIdx> {
    selection_universe(corpus)
        .into_iter()
        .filter(|&j| corpus.journal(j).is_trade)
        .collect()
}

/// Step two: non-trade journals publishing in the year of analysis but
/// missing at least one of the three preceding years.
pub fn exclude_noncontinuous(corpus: &Corpus) -> Vec<JournalIdx> {
    let y = corpus.year();
    selection_universe(corpus)
        .into_iter()
        .filter(|&j| !corpus.journal(j).is_trade)
        .filter(|&j| (y - 3..y).any(|yr| corpus.pubs_of(j, yr).is_empty()))
        .collect()
}

/// References of `publication` into the cited window whose target journal
/// is in `included`.
pub fn active_reference_count(corpus: &Corpus, publication: PubIdx, included: &JournalSet) -> usize {
    corpus
        .publication(publication)
        .references
        .iter()
        .map(|&t| corpus.publication(t))
        .filter(|t| corpus.in_cited_window(t.year) && included.contains(t.journal))
        .count()
}

/// `(publications with >= 1 active reference, publications)` for the
/// year-`Y` cohort of `journal`.
pub fn active_counts(corpus: &Corpus, journal: JournalIdx, included: &JournalSet) -> (usize, usize) {
    let cohort = corpus.pubs_of(journal, corpus.year());
    let active = cohort
        .iter()
        .filter(|&&p| has_active_reference(corpus, p, included))
        .count();
    (active, cohort.len())
}

fn has_active_reference(corpus: &Corpus, publication: PubIdx, included: &JournalSet) -> bool {
    corpus
        .publication(publication)
        .references
        .iter()
        .map(|&t| corpus.publication(t))
        .any(|t| corpus.in_cited_window(t.year) && included.contains(t.journal))
}

fn share(active: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        active as f64 / total as f64
    }
}

// Inclusive: a share exactly equal to the threshold passes. Both sides are
// correctly rounded, so a decimal threshold equal to active/total ties.
fn passes_threshold(corpus: &Corpus, j: JournalIdx, included: &JournalSet, threshold: f64) -> bool {
    let (active, total) = active_counts(corpus, j, included);
    share(active, total) >= threshold
}

pub fn select_citing_journals(corpus: &Corpus, config: SelectionConfig) -> Result<CitingJournalSet> {
    let SelectionConfig {
        threshold,
        max_iterations,
    } = config;
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::InvalidThreshold(threshold));
    }
    let universe = selection_universe(corpus);
    if universe.is_empty() {
        return Err(Error::EmptySelectionUniverse(corpus.year()));
    }

    let mut excluded = BTreeMap::new();
    for j in exclude_trade(corpus) {
        excluded.insert(j, ExclusionReason::Trade);
    }
    for j in exclude_noncontinuous(corpus) {
        excluded.insert(j, ExclusionReason::NotContinuous);
    }
    let candidates: Vec<JournalIdx> = universe
        .iter()
        .copied()
        .filter(|j| !excluded.contains_key(j))
        .collect();
    let mut included = JournalSet::from_indices(corpus, candidates.iter().copied());

    let mut exclusion_round = BTreeMap::new();
    let mut iterations = 0;
    loop {
        if iterations == max_iterations {
            return Err(Error::SelectionDidNotConverge(max_iterations));
        }
        iterations += 1;
        let current: Vec<JournalIdx> = included.iter().collect();
        let failing: Vec<JournalIdx> = current
            .par_iter()
            .copied()
            .filter(|&j| !passes_threshold(corpus, j, &included, threshold))
            .collect();
        if failing.is_empty() {
            break;
        }
        for j in failing {
            included.remove(j);
            excluded.insert(j, ExclusionReason::BelowActiveThreshold);
            exclusion_round.insert(j, iterations);
        }
    }

    let active_share = candidates
        .par_iter()
        .map(|&j| {
            let (a, t) = active_counts(corpus, j, &included);
            (j, share(a, t))
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect();

    Ok(CitingJournalSet {
        year: corpus.year(),
        threshold,
        included,
        excluded,
        exclusion_round,
        iterations,
        active_share,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, FixtureBuilder};

    #[test]
    fn no_trade_journals() {
        let c = fixtures::saturated_selection();
        assert!(exclude_trade(&c).is_empty());
    }

    #[test]
    fn trade_journals_publishing_in_year() {
        let mut b = FixtureBuilder::new(2010);
        for (id, trade, years) in [
            ("T1", true, &[2010][..]),
            ("T2", true, &[2009, 2010][..]),
            ("T3", true, &[2008][..]),
            ("R", false, &[2010][..]),
        ] {
            b.journal(id, trade);
            for &y in years {
                b.publication(id, y, &[]);
            }
        }
        let c = b.build();
        let ids: Vec<_> = exclude_trade(&c).iter().map(|&j| c.journal(j).id.0.clone()).collect();
        assert_eq!(ids, vec!["T1", "T2"]);
    }

    #[test]
    fn continuity() {
        let mut b = FixtureBuilder::new(2010);
        b.journal("full", false);
        b.journal("short", false);
        b.journal("trade", true);
        for y in 2007..=2010 {
            b.publication("full", y, &[]);
        }
        for y in [2009, 2010] {
            b.publication("short", y, &[]);
            b.publication("trade", y, &[]);
        }
        let c = b.build();
        let ids: Vec<_> = exclude_noncontinuous(&c)
            .iter()
            .map(|&j| c.journal(j).id.0.clone())
            .collect();
        assert_eq!(ids, vec!["short"]);
    }

    #[test]
    fn active_reference_counting() {
        let mut b = FixtureBuilder::new(2010);
        b.journal("in", false);
        b.journal("out", false);
        b.journal("cite", false);
        let a = b.publication("in", 2008, &[]);
        let a2 = b.publication("in", 2009, &[]);
        let x = b.publication("out", 2008, &[]);
        let old = b.publication("in", 2005, &[]);
        let empty = b.publication("cite", 2010, &[]);
        let p = b.publication("cite", 2010, &[&a, &a2, &x, &old]);
        let c = b.build();
        let mut included = JournalSet::all(&c);
        included.remove(c.journal_idx("out").unwrap());
        assert_eq!(active_reference_count(&c, c.pub_idx(&p).unwrap(), &included), 2);
        assert_eq!(active_reference_count(&c, c.pub_idx(&empty).unwrap(), &included), 0);
        // against every database journal the out-of-set reference counts too
        let all = JournalSet::all(&c);
        assert_eq!(active_reference_count(&c, c.pub_idx(&p).unwrap(), &all), 3);
    }

    #[test]
    fn saturated_corpus_converges_in_one_round() {
        let c = fixtures::saturated_selection();
        let s = select_citing_journals(&c, SelectionConfig::default()).unwrap();
        assert_eq!(s.iterations, 1);
        assert_eq!(s.included.len(), c.num_journals());
        assert!(s.excluded.is_empty());
        assert!(s.is_fixed_point(&c));
    }

    #[test]
    fn cascading_exclusions_follow_predicted_rounds() {
        let c = fixtures::cascading_selection();
        let s = select_citing_journals(&c, SelectionConfig::default()).unwrap();
        let round = |id: &str| s.exclusion_round.get(&c.journal_idx(id).unwrap()).copied();
        assert_eq!(round("A"), Some(1));
        assert_eq!(round("B"), Some(2));
        assert_eq!(round("C"), Some(3));
        assert_eq!(round("D"), None);
        assert_eq!(s.iterations, 4);
        assert_eq!(s.included.ids(&c), vec![JournalId::from("D")]);
        assert!(s.is_fixed_point(&c));
    }

    #[test]
    fn threshold_boundary_is_inclusive() {
        let c = fixtures::threshold_boundary();
        let s = select_citing_journals(&c, SelectionConfig::default()).unwrap();
        let edge = c.journal_idx("EDGE").unwrap();
        assert_eq!(s.active_share[&edge], 0.2);
        assert!(s.included.contains(edge));
        let below = c.journal_idx("BELOW").unwrap();
        assert!(!s.included.contains(below));
        assert_eq!(s.excluded[&below], ExclusionReason::BelowActiveThreshold);
    }

    #[test]
    fn invalid_inputs() {
        let c = fixtures::saturated_selection();
        for t in [0.0, -0.1, 1.5, f64::NAN] {
            let cfg = SelectionConfig { threshold: t, ..Default::default() };
            assert!(matches!(select_citing_journals(&c, cfg), Err(Error::InvalidThreshold(_))));
        }
        assert!(matches!(
            select_citing_journals(&Corpus::empty(2010), SelectionConfig::default()),
            Err(Error::EmptySelectionUniverse(2010))
        ));
        let cascade = fixtures::cascading_selection();
        let cfg = SelectionConfig { max_iterations: 2, ..Default::default() };
        assert!(matches!(
            select_citing_journals(&cascade, cfg),
            Err(Error::SelectionDidNotConverge(2))
        ));
    }

    #[test]
    fn document_round_trips_to_citing_set() {
        let c = fixtures::cascading_selection();
        let s = select_citing_journals(&c, SelectionConfig::default()).unwrap();
        let doc = s.document(&c);
        let json = serde_json::to_string(&doc).unwrap();
        assert!(json.contains("\"below_active_threshold\""));
        let back: SelectionDocument = serde_json::from_str(&json).unwrap();
        assert_eq!(back.citing_set(&c).unwrap(), s.included);
    }
}
