//! Field-mean comparison of the source-normalized modes on a generated
//! world, with the analytically predicted outcome for each mode.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{generate, FieldSpec, SynthSpec, SynthWorld};
use crate::corpus::{JournalSet, Year};
use crate::error::{Error, Result};
use crate::exact::{self, Ratio};
use crate::indicators::{build_table, CitingContext, IndicatorMode};

/// Largest relative gap between field means still counted as equal.
pub const EQUAL_GAP: f64 = 0.01;
/// Smallest relative gap counted as a real difference.
pub const DIFFER_GAP: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    Equal,
    Differ,
    /// No prediction is made for this mode.
    None,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiasField {
    pub name: String,
    /// Realized share of citing publications without active references.
    pub zero_active_share: f64,
    pub mean_active_refs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeBias {
    pub mode: IndicatorMode,
    pub field_means: Vec<Option<f64>>,
    pub predicted_means: Vec<Option<f64>>,
    /// `(max - min) / max` over the field means.
    pub relative_gap: Option<f64>,
    pub expectation: Expectation,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiasReport {
    pub fields: Vec<BiasField>,
    pub modes: Vec<ModeBias>,
    pub equal_gap: f64,
    pub differ_gap: f64,
    pub pass: bool,
}

fn relative_gap(values: &[Option<f64>]) -> Option<f64> {
    let values: Option<Vec<f64>> = values.iter().copied().collect();
    let values = values?;
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    (max > 0.0).then(|| (max - min) / max)
}

/// Counts per field used for the predictions: cited-window publications,
/// citing publications and citing publications with an active reference.
struct FieldCounts {
    m1: u64,
    m2: u64,
    active: u64,
    refs: u64,
}

/// Per-mode field means of the cited journals in `world`.
///
/// Predictions: every citing publication hands out a total weight of `1/p`
/// under the revised indicator and `cohort size / cohort references` per
/// reference under the audience factor, so both give `3 * M2 / M1`. The
/// a-priori weights of a publication sum to 1 only when it has an active
/// reference, giving `3 * A / M1` with `A` the active publications; the
/// fractional mode agrees when there are no references outside the
/// database. Predictions assume no cross-field traffic.
pub fn bias_report(world: &SynthWorld, citing: &JournalSet, modes: &[IndicatorMode]) -> Result<BiasReport> {
    let corpus = &world.corpus;
    let year = corpus.year();
    let names = world.field_names();
    let n = names.len();
    let ctx = CitingContext::new(corpus, citing);

    let mut counts: Vec<FieldCounts> = (0..n)
        .map(|_| FieldCounts { m1: 0, m2: 0, active: 0, refs: 0 })
        .collect();
    let mut field_idx = vec![None; corpus.num_journals()];
    for j in corpus.journal_indices() {
        let id = &corpus.journal(j).id;
        let &f = world
            .field_of
            .get(id)
            .ok_or_else(|| Error::UnassignedJournal(id.to_string()))?;
        field_idx[j.index()] = Some(f);
        counts[f].m1 += corpus.window_count(j) as u64;
        if citing.contains(j) {
            for &p in corpus.pubs_of(j, year) {
                counts[f].m2 += 1;
                let r = ctx.active_refs(p);
                counts[f].active += u64::from(r > 0);
                counts[f].refs += r;
            }
        }
    }
    let fields = names
        .iter()
        .zip(&counts)
        .map(|(name, c)| BiasField {
            name: name.clone(),
            zero_active_share: if c.m2 == 0 { 0.0 } else { 1.0 - c.active as f64 / c.m2 as f64 },
            mean_active_refs: if c.m2 == 0 { 0.0 } else { c.refs as f64 / c.m2 as f64 },
        })
        .collect();

    let closed = world.spec.fields.iter().all(|f| f.cross_field_fraction == 0.0);
    let no_outside_refs = world.spec.fields.iter().all(|f| f.inactive_refs == 0);
    let mut reports = Vec::new();
    for &mode in modes {
        let table = build_table(corpus, mode, citing, 0)?;
        let mut sums = vec![(Ratio::zero(), 0u64); n];
        for s in &table.scores {
            let j = corpus.require_journal(s.journal.as_str())?;
            if let (Some(f), Some(v)) = (field_idx[j.index()], &s.snip) {
                sums[f].0 += v * exact::integer(s.m);
                sums[f].1 += s.m;
            }
        }
        let field_means: Vec<Option<f64>> = sums
            .into_iter()
            .map(|(num, den)| (den > 0).then(|| exact::to_f64(&(num / exact::integer(den)))))
            .collect();

        let predict = |num: fn(&FieldCounts) -> u64| -> Vec<Option<f64>> {
            counts
                .iter()
                .map(|c| (c.m1 > 0).then(|| 3.0 * num(c) as f64 / c.m1 as f64))
                .collect()
        };
        let predicted_means = match mode {
            _ if !closed => vec![None; n],
            IndicatorMode::SnipRevised | IndicatorMode::AudienceFactor => predict(|c| c.m2),
            IndicatorMode::Apriori => predict(|c| c.active),
            IndicatorMode::FractionalCounting if no_outside_refs => predict(|c| c.active),
            _ => vec![None; n],
        };
        let expectation = match relative_gap(&predicted_means) {
            Some(g) if g <= EQUAL_GAP => Expectation::Equal,
            Some(g) if g > DIFFER_GAP => Expectation::Differ,
            _ => Expectation::None,
        };
        let gap = relative_gap(&field_means);
        let pass = match (expectation, gap) {
            (Expectation::None, _) => true,
            (Expectation::Equal, Some(g)) => g <= EQUAL_GAP,
            (Expectation::Differ, Some(g)) => g > DIFFER_GAP,
            (_, None) => false,
        };
        reports.push(ModeBias {
            mode,
            field_means,
            predicted_means,
            relative_gap: gap,
            expectation,
            pass,
        });
    }
    let pass = reports.iter().all(|m| m.pass);
    Ok(BiasReport {
        fields,
        modes: reports,
        equal_gap: EQUAL_GAP,
        differ_gap: DIFFER_GAP,
        pass,
    })
}

/// Generates a two-field world from `low` and `high` and reports the
/// field means of each mode, with every journal citing.
pub fn bias_experiment(
    low: &FieldSpec,
    high: &FieldSpec,
    modes: &[IndicatorMode],
    year_of_analysis: Year,
    seed: u64,
) -> Result<BiasReport> {
    let world = generate(&SynthSpec {
        fields: vec![low.clone(), high.clone()],
        year_of_analysis,
        seed,
    })?;
    let all = JournalSet::all(&world.corpus);
    bias_report(&world, &all, modes)
}

#[cfg(test)]
mod tests {
    use super::super::tests::field;
    use super::super::RefCountDistribution;
    use super::*;

    fn density_pair(zero_low: f64, zero_high: f64) -> (FieldSpec, FieldSpec) {
        let low = FieldSpec {
            name: Some("low".into()),
            ..field(
                4,
                30,
                RefCountDistribution::Weighted {
                    weights: vec![(0, zero_low), (2, (1.0 - zero_low) / 2.0), (4, (1.0 - zero_low) / 2.0)],
                },
            )
        };
        let high = FieldSpec {
            name: Some("high".into()),
            ..field(
                4,
                30,
                RefCountDistribution::Weighted {
                    weights: vec![(0, zero_high), (12, (1.0 - zero_high) / 2.0), (20, (1.0 - zero_high) / 2.0)],
                },
            )
        };
        (low, high)
    }

    #[test]
    fn equal_zero_shares_equalize_every_mode() {
        let (low, high) = density_pair(0.0, 0.0);
        let report = bias_experiment(&low, &high, &IndicatorMode::ALL, 2010, 1).unwrap();
        assert!(report.pass);
        for m in &report.modes {
            if m.mode == IndicatorMode::Rip {
                assert_eq!(m.expectation, Expectation::None);
                assert!(m.relative_gap.unwrap() > 0.5, "reference density shows in RIP");
            } else if m.mode == IndicatorMode::SnipOriginal {
                assert_eq!(m.expectation, Expectation::None);
            } else {
                assert_eq!(m.expectation, Expectation::Equal, "{:?}", m.mode);
                assert!(m.relative_gap.unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_active_share_biases_apriori_but_not_revised() {
        let (low, high) = density_pair(0.5, 0.0);
        let report = bias_experiment(&low, &high, &IndicatorMode::ALL, 2010, 2).unwrap();
        assert!(report.pass);
        let by_mode = |mode| report.modes.iter().find(|m| m.mode == mode).unwrap();
        let apriori = by_mode(IndicatorMode::Apriori);
        assert_eq!(apriori.expectation, Expectation::Differ);
        let means: Vec<f64> = apriori.field_means.iter().map(|m| m.unwrap()).collect();
        assert!((means[0] - 0.5).abs() < 1e-12 && (means[1] - 1.0).abs() < 1e-12);
        assert_eq!(by_mode(IndicatorMode::FractionalCounting).expectation, Expectation::Differ);
        let revised = by_mode(IndicatorMode::SnipRevised);
        assert_eq!(revised.expectation, Expectation::Equal);
        assert!(revised.relative_gap.unwrap() <= EQUAL_GAP);
        assert!((report.fields[0].zero_active_share - 0.5).abs() < 1e-12);
    }

    #[test]
    fn cross_field_traffic_drops_predictions() {
        let (low, mut high) = density_pair(0.2, 0.0);
        high.cross_field_fraction = 0.2;
        let report = bias_experiment(&low, &high, &IndicatorMode::ALL, 2010, 3).unwrap();
        assert!(report.modes.iter().all(|m| m.expectation == Expectation::None));
    }
}
