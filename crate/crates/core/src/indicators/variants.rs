//! Other source-normalized indicators written in the same `(3/m) * sum(w)`
//! form as the revised SNIP, over the same retained citation events:
//!
//! * audience factor: `w = 1 / (mean active references per publication of
//!   the citing journal-year cohort)`;
//! * fractional counting: `w = 1 / (all references of the citing
//!   publication)`, window and database coverage ignored;
//! * a-priori normalization: `w = 1 / r`, with no cohort-share correction.

use num_traits::Zero;

use super::{revised, CitingContext, IndicatorMode, JournalScore};
use crate::corpus::{Corpus, JournalIdx, JournalSet};
use crate::error::{Error, Result};
use crate::exact::{self, FractionSum, Ratio};

pub fn variant_indicator(
    corpus: &Corpus,
    citing: &JournalSet,
    journal: &str,
    mode: IndicatorMode,
) -> Result<JournalScore> {
    let j = corpus.require_journal(journal)?;
    let ctx = CitingContext::new(corpus, citing);
    score(&ctx, j, mode)
}

pub(crate) fn score(ctx: &CitingContext<'_>, j: JournalIdx, mode: IndicatorMode) -> Result<JournalScore> {
    let corpus = ctx.corpus();
    let field = revised::subject_field(ctx, j);
    let mut weights = FractionSum::new();
    let mut dropped = field.zero_active_dropped;
    let mut n = 0;
    for e in &field.entries {
        let citing_pub = corpus.publication(e.citing);
        let (numer, denom) = match mode {
            IndicatorMode::Apriori => (1, e.r),
            IndicatorMode::FractionalCounting => (1, citing_pub.raw_reference_count as u64),
            IndicatorMode::AudienceFactor => {
                let cohort = ctx
                    .cohort(citing_pub.journal)
                    .expect("citing publication belongs to a cohort");
                (cohort.total, ctx.cohort_active_refs(citing_pub.journal))
            }
            other => {
                return Err(Error::InvalidValue(format!(
                    "`{other}` is not a variant indicator"
                )))
            }
        };
        if denom == 0 {
            dropped += e.multiplicity;
            continue;
        }
        n += e.multiplicity;
        weights.add(e.multiplicity * numer, denom);
    }

    let mut s = JournalScore::undefined(corpus.journal(j).id.clone());
    s.m = corpus.window_count(j) as u64;
    s.n = n;
    s.flags.zero_active_dropped = dropped;
    if s.m > 0 {
        s.rip = Some(exact::ratio(n, s.m));
        s.snip = Some(if weights.is_empty() {
            Ratio::zero()
        } else {
            weights.total() * exact::ratio(3, s.m)
        });
    }
    Ok(s)
}
