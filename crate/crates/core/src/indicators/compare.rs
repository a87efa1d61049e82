use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{IndicatorMode, IndicatorTable, JournalScore};
use crate::corpus::JournalId;
use crate::error::{Error, Result};
use crate::exact::{self, Ratio};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScatterPoint {
    pub journal_id: JournalId,
    pub m: u64,
    pub a: f64,
    pub b: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub mode_a: IndicatorMode,
    pub mode_b: IndicatorMode,
    pub min_pubs: u64,
    /// Journals scored in both tables with at least `min_pubs` publications.
    pub journals_compared: usize,
    pub only_in_a: usize,
    pub only_in_b: usize,
    pub below_min_pubs: usize,
    pub undefined: usize,
    pub pearson: Option<f64>,
    pub weighted_mean_a: f64,
    pub weighted_mean_b: f64,
    /// `weighted_mean_a / weighted_mean_b`.
    pub mean_ratio: Option<f64>,
    pub scatter: Vec<ScatterPoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DifferenceEntry {
    pub journal_id: JournalId,
    pub m: u64,
    pub revised: f64,
    pub original: f64,
    pub difference: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DifferenceReport {
    pub factor: f64,
    /// `true` when the factor came from the caller instead of the data.
    pub factor_overridden: bool,
    pub min_pubs: u64,
    pub skipped_missing: usize,
    pub skipped_below_min_pubs: usize,
    pub skipped_undefined: usize,
    pub top_positive: Vec<DifferenceEntry>,
    pub top_negative: Vec<DifferenceEntry>,
    /// Every compared journal, by id.
    pub differences: Vec<DifferenceEntry>,
}

/// Pairs rows of two tables by journal, sorting the leftovers into tallies.
struct Pairing<'t> {
    pairs: Vec<(&'t JournalScore, &'t JournalScore)>,
    only_in_a: usize,
    only_in_b: usize,
    below_min_pubs: usize,
    undefined: usize,
}

fn pair<'t>(a: &'t IndicatorTable, b: &'t IndicatorTable, min_pubs: u64) -> Result<Pairing<'t>> {
    if let (Some(ya), Some(yb)) = (a.year, b.year) {
        if ya != yb {
            return Err(Error::YearMismatch(ya, yb));
        }
    }
    let by_id: BTreeMap<&str, &JournalScore> =
        b.scores.iter().map(|s| (s.journal.as_str(), s)).collect();
    let mut out = Pairing {
        pairs: Vec::new(),
        only_in_a: 0,
        only_in_b: 0,
        below_min_pubs: 0,
        undefined: 0,
    };
    let mut matched = 0;
    for sa in &a.scores {
        let Some(&sb) = by_id.get(sa.journal.as_str()) else {
            out.only_in_a += 1;
            continue;
        };
        matched += 1;
        if sa.m < min_pubs || sb.m < min_pubs {
            out.below_min_pubs += 1;
        } else if sa.snip.is_none() || sb.snip.is_none() {
            out.undefined += 1;
        } else {
            out.pairs.push((sa, sb));
        }
    }
    out.only_in_b = b.scores.len() - matched;
    Ok(out)
}

fn weighted_mean<'s>(rows: impl Iterator<Item = &'s JournalScore>) -> Option<Ratio> {
    let mut num = Ratio::zero();
    let mut den = 0u64;
    for s in rows {
        num += s.snip.as_ref().expect("paired rows have scores") * exact::integer(s.m);
        den += s.m;
    }
    (den > 0).then(|| num / exact::integer(den))
}

/// Pearson correlation; `None` for fewer than two points or zero variance.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    assert_eq!(xs.len(), ys.len(), "pearson needs paired samples");
    let n = xs.len();
    if n < 2 {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Correlation, publication-weighted means and scatter pairs over the
/// journals both tables score with at least `min_pubs` publications.
pub fn compare_tables(
    a: &IndicatorTable,
    b: &IndicatorTable,
    min_pubs: u64,
) -> Result<ComparisonReport> {
    let p = pair(a, b, min_pubs)?;
    if p.pairs.len() < 2 {
        return Err(Error::TooFewCommonJournals(p.pairs.len()));
    }
    let xs: Vec<f64> = p.pairs.iter().map(|(sa, _)| sa.snip_f64().unwrap()).collect();
    let ys: Vec<f64> = p.pairs.iter().map(|(_, sb)| sb.snip_f64().unwrap()).collect();
    let mean_a = weighted_mean(p.pairs.iter().map(|(sa, _)| *sa)).unwrap_or_default();
    let mean_b = weighted_mean(p.pairs.iter().map(|(_, sb)| *sb)).unwrap_or_default();
    let mean_ratio = (!mean_b.is_zero()).then(|| exact::to_f64(&(&mean_a / &mean_b)));
    let scatter = p
        .pairs
        .iter()
        .zip(xs.iter().zip(&ys))
        .map(|((sa, _), (&x, &y))| ScatterPoint {
            journal_id: sa.journal.clone(),
            m: sa.m,
            a: x,
            b: y,
        })
        .collect();
    Ok(ComparisonReport {
        mode_a: a.mode,
        mode_b: b.mode,
        min_pubs,
        journals_compared: p.pairs.len(),
        only_in_a: p.only_in_a,
        only_in_b: p.only_in_b,
        below_min_pubs: p.below_min_pubs,
        undefined: p.undefined,
        pearson: pearson(&xs, &ys),
        weighted_mean_a: exact::to_f64(&mean_a),
        weighted_mean_b: exact::to_f64(&mean_b),
        mean_ratio,
        scatter,
    })
}

/// Per-journal `revised - original / factor`.
///
/// Without an explicit `factor` the ratio of the tables' publication-weighted
/// mean scores (original over revised) is used.
pub fn snip_difference(
    revised: &IndicatorTable,
    original: &IndicatorTable,
    factor: Option<f64>,
    min_pubs: u64,
    top_n: usize,
) -> Result<DifferenceReport> {
    let (factor, overridden) = match factor {
        Some(f) => {
            let r = (f.is_finite() && f > 0.0)
                .then(|| Ratio::from_float(f))
                .flatten()
                .ok_or_else(|| Error::InvalidValue(format!("scale factor must be positive, got {f}")))?;
            (r, true)
        }
        None => {
            let derived = match (&original.weighted_mean_snip, &revised.weighted_mean_snip) {
                (Some(o), Some(r)) if r.is_positive() && o.is_positive() => o / r,
                _ => {
                    return Err(Error::InvalidValue(
                        "cannot derive a scale factor: a table has no positive weighted mean".into(),
                    ))
                }
            };
            (derived, false)
        }
    };

    let p = pair(revised, original, min_pubs)?;
    let mut differences: Vec<(Ratio, DifferenceEntry)> = p
        .pairs
        .iter()
        .map(|(sr, so)| {
            let (r, o) = (sr.snip.as_ref().unwrap(), so.snip.as_ref().unwrap());
            let d = r - o / &factor;
            let entry = DifferenceEntry {
                journal_id: sr.journal.clone(),
                m: sr.m,
                revised: exact::to_f64(r),
                original: exact::to_f64(o),
                difference: exact::to_f64(&d),
            };
            (d, entry)
        })
        .collect();

    let mut by_value: Vec<&(Ratio, DifferenceEntry)> = differences.iter().collect();
    by_value.sort_by(|x, y| y.0.cmp(&x.0).then_with(|| x.1.journal_id.cmp(&y.1.journal_id)));
    let top_positive = by_value
        .iter()
        .take_while(|(d, _)| d.is_positive())
        .take(top_n)
        .map(|(_, e)| e.clone())
        .collect();
    by_value.sort_by(|x, y| x.0.cmp(&y.0).then_with(|| x.1.journal_id.cmp(&y.1.journal_id)));
    let top_negative = by_value
        .iter()
        .take_while(|(d, _)| d.is_negative())
        .take(top_n)
        .map(|(_, e)| e.clone())
        .collect();

    differences.sort_by(|x, y| x.1.journal_id.cmp(&y.1.journal_id));
    Ok(DifferenceReport {
        factor: exact::to_f64(&factor),
        factor_overridden: overridden,
        min_pubs,
        skipped_missing: p.only_in_a + p.only_in_b,
        skipped_below_min_pubs: p.below_min_pubs,
        skipped_undefined: p.undefined,
        top_positive,
        top_negative,
        differences: differences.into_iter().map(|(_, e)| e).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;
    use crate::fixtures;
    use crate::indicators::ScoreFlags;

    fn table(mode: IndicatorMode, rows: &[(&str, u64, Ratio)]) -> IndicatorTable {
        let scores = rows
            .iter()
            .map(|(id, m, snip)| JournalScore {
                journal: JournalId::from(*id),
                m: *m,
                n: 0,
                rip: None,
                dcp: None,
                rdcp: None,
                snip: Some(snip.clone()),
                flags: ScoreFlags::default(),
            })
            .collect();
        IndicatorTable::from_scores(mode, Some(2010), scores, None, String::new())
    }

    fn three_journals() -> (IndicatorTable, IndicatorTable) {
        let revised = table(
            IndicatorMode::SnipRevised,
            &[("A", 100, ratio(2, 1)), ("B", 200, ratio(1, 1)), ("C", 100, ratio(1, 2))],
        );
        let original = table(
            IndicatorMode::SnipOriginal,
            &[("A", 100, ratio(12, 5)), ("B", 200, ratio(6, 5)), ("C", 100, ratio(6, 5))],
        );
        (revised, original)
    }

    #[test]
    fn pearson_hand_check() {
        assert!((pearson(&[1.0, 2.0, 3.0], &[1.0, 3.0, 2.0]).unwrap() - 0.5).abs() < 1e-15);
        assert!((pearson(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(pearson(&[1.0, 1.0], &[2.0, 3.0]), None);
        assert_eq!(pearson(&[1.0], &[2.0]), None);
    }

    #[test]
    fn self_comparison() {
        let (revised, _) = three_journals();
        let r = compare_tables(&revised, &revised, 0).unwrap();
        assert!((r.pearson.unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(r.mean_ratio, Some(1.0));
        assert_eq!(r.journals_compared, 3);
        assert_eq!(r.scatter.len(), 3);
    }

    #[test]
    fn comparison_filters_and_means() {
        let (revised, original) = three_journals();
        let r = compare_tables(&original, &revised, 0).unwrap();
        assert_eq!(r.weighted_mean_a, 1.5);
        assert_eq!(r.weighted_mean_b, 1.125);
        assert!((r.mean_ratio.unwrap() - 4.0 / 3.0).abs() < 1e-15);

        let r = compare_tables(&original, &revised, 150);
        assert!(matches!(r, Err(Error::TooFewCommonJournals(1))));

        let other = table(IndicatorMode::Rip, &[("Z", 500, ratio(1, 1)), ("A", 500, ratio(1, 1))]);
        assert!(matches!(
            compare_tables(&revised, &other, 0),
            Err(Error::TooFewCommonJournals(1))
        ));
        let mut later = original.clone();
        later.year = Some(2011);
        assert!(matches!(compare_tables(&revised, &later, 0), Err(Error::YearMismatch(2010, 2011))));
    }

    #[test]
    fn difference_hand_check() {
        let (revised, original) = three_journals();
        let d = snip_difference(&revised, &original, None, 0, 10).unwrap();
        assert!((d.factor - 4.0 / 3.0).abs() < 1e-15);
        assert!(!d.factor_overridden);
        let values: Vec<f64> = d.differences.iter().map(|e| e.difference).collect();
        assert_eq!(values, vec![0.2, 0.1, -0.4]);
        let pos: Vec<&str> = d.top_positive.iter().map(|e| e.journal_id.as_str()).collect();
        assert_eq!(pos, ["A", "B"]);
        assert_eq!(d.top_negative.len(), 1);
        assert_eq!(d.top_negative[0].journal_id.as_str(), "C");

        let d = snip_difference(&revised, &original, None, 0, 1).unwrap();
        assert_eq!(d.top_positive.len(), 1);
    }

    #[test]
    fn identical_tables_with_unit_factor() {
        let (revised, _) = three_journals();
        let d = snip_difference(&revised, &revised, Some(1.0), 0, 5).unwrap();
        assert!(d.differences.iter().all(|e| e.difference == 0.0));
        assert!(d.top_positive.is_empty() && d.top_negative.is_empty());
    }

    #[test]
    fn difference_tallies_and_rejects() {
        let (revised, mut original) = three_journals();
        original.scores.retain(|s| s.journal.as_str() != "B");
        let d = snip_difference(&revised, &original, Some(1.25), 0, 5).unwrap();
        assert_eq!(d.skipped_missing, 1);
        assert_eq!(d.differences.len(), 2);
        let d = snip_difference(&revised, &original, Some(1.25), 150, 5).unwrap();
        assert_eq!(d.skipped_below_min_pubs, 2);
        assert!(snip_difference(&revised, &original, Some(0.0), 0, 5).is_err());
        assert!(snip_difference(&revised, &original, Some(f64::NAN), 0, 5).is_err());
    }

    #[test]
    fn published_top_journals_difference_list() {
        let (revised, original) = fixtures::published_top_journals();
        let d = snip_difference(&revised, &original, Some(1.26), 100, 10).unwrap();
        let top = &d.top_positive[0];
        assert_eq!(top.journal_id.as_str(), "Acta Crystallographica Section A");
        assert!((top.difference - 12.07).abs() <= 0.1, "{}", top.difference);
        let bottom = &d.top_negative[0];
        assert_eq!(
            bottom.journal_id.as_str(),
            "IEEE Trans. on Pattern Analysis and Machine Intelligence"
        );
        assert!((bottom.difference - -6.41).abs() <= 0.1, "{}", bottom.difference);
    }
}
