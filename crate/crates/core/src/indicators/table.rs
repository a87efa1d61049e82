use std::io::{Read, Write};

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    original, revised, variants, CitingContext, IndicatorMode, JournalScore, ScoreFlags,
};
use crate::corpus::{Corpus, JournalId, JournalIdx, JournalSet, Year};
use crate::error::{Error, Result};
use crate::exact::{self, Ratio};

/// Scores of one indicator family for one year of analysis, sorted by
/// journal id. Only journals with at least one cited-window publication
/// get a row.
#[derive(Clone, Debug, PartialEq)]
pub struct IndicatorTable {
    pub mode: IndicatorMode,
    /// Unknown for tables read back from `scores.csv`.
    pub year: Option<Year>,
    pub scores: Vec<JournalScore>,
    pub median_dcp: Option<Ratio>,
    pub weighted_mean_snip: Option<Ratio>,
    pub notes: String,
}

impl IndicatorTable {
    pub fn from_scores(
        mode: IndicatorMode,
        year: Option<Year>,
        mut scores: Vec<JournalScore>,
        median_dcp: Option<Ratio>,
        notes: String,
    ) -> Self {
        scores.sort_by(|a, b| a.journal.cmp(&b.journal));
        let mut table = IndicatorTable {
            mode,
            year,
            scores,
            median_dcp,
            weighted_mean_snip: None,
            notes,
        };
        table.weighted_mean_snip = table.weighted_mean(|_| true);
        table
    }

    pub fn get(&self, journal: &str) -> Option<&JournalScore> {
        self.scores
            .binary_search_by(|s| s.journal.as_str().cmp(journal))
            .ok()
            .map(|i| &self.scores[i])
    }

    /// `sum(m * snip) / sum(m)` over rows with a defined score that pass
    /// `filter`.
    pub fn weighted_mean(&self, filter: impl Fn(&JournalScore) -> bool) -> Option<Ratio> {
        let mut num = Ratio::zero();
        let mut den = 0u64;
        for s in self.scores.iter().filter(|s| filter(s)) {
            if let Some(v) = &s.snip {
                num += v * exact::integer(s.m);
                den += s.m;
            }
        }
        (den > 0).then(|| num / exact::integer(den))
    }

    pub fn document(&self) -> TableDocument {
        let f = |r: &Option<Ratio>| r.as_ref().map(exact::to_f64);
        TableDocument {
            mode: self.mode,
            year: self.year,
            median_dcp: f(&self.median_dcp),
            weighted_mean_snip: f(&self.weighted_mean_snip),
            notes: self.notes.clone(),
            scores: self
                .scores
                .iter()
                .map(|s| ScoreDocument {
                    journal_id: s.journal.clone(),
                    m: s.m,
                    n: s.n,
                    rip: f(&s.rip),
                    dcp: f(&s.dcp),
                    rdcp: f(&s.rdcp),
                    snip: f(&s.snip),
                    flags: s.flags.clone(),
                })
                .collect(),
        }
    }
}

/// Full-precision JSON form of a table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableDocument {
    pub mode: IndicatorMode,
    pub year: Option<Year>,
    pub median_dcp: Option<f64>,
    pub weighted_mean_snip: Option<f64>,
    pub notes: String,
    pub scores: Vec<ScoreDocument>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreDocument {
    pub journal_id: JournalId,
    pub m: u64,
    pub n: u64,
    pub rip: Option<f64>,
    pub dcp: Option<f64>,
    pub rdcp: Option<f64>,
    pub snip: Option<f64>,
    pub flags: ScoreFlags,
}

/// Scores every journal with cited-window publications.
///
/// `citing` is the citing-journal set for the revised indicator and its
/// variants (and for RIP). The original indicator always uses every database
/// journal as its universe; `citing` then only drives the `citing` flag.
pub fn build_table(
    corpus: &Corpus,
    mode: IndicatorMode,
    citing: &JournalSet,
    min_pubs: u64,
) -> Result<IndicatorTable> {
    let scored: Vec<JournalIdx> = corpus
        .journal_indices()
        .filter(|&j| corpus.window_count(j) > 0)
        .collect();

    let (mut scores, median, notes) = match mode {
        IndicatorMode::SnipOriginal => {
            let universe = JournalSet::all(corpus);
            let ctx = CitingContext::new(corpus, &universe);
            let median = original::median_from_context(&ctx);
            // without any subject field nothing is cited and every score is 0;
            // the placeholder median never divides a defined DCP
            let divisor = median.clone().unwrap_or_else(|| exact::integer(1));
            let scores = scored
                .par_iter()
                .map(|&j| original::score(&ctx, j, &divisor))
                .collect::<Result<Vec<_>>>()?;
            (scores, median, "active references and citations counted against all database journals".to_owned())
        }
        IndicatorMode::Rip => {
            let scores = scored
                .par_iter()
                .map(|&j| {
                    let mut s = JournalScore::undefined(corpus.journal(j).id.clone());
                    s.m = corpus.window_count(j) as u64;
                    s.n = corpus.citation_events(j, citing).len() as u64;
                    s.rip = Some(exact::ratio(s.n, s.m));
                    s.snip = s.rip.clone();
                    s
                })
                .collect();
            (scores, None, citing_note(citing))
        }
        IndicatorMode::SnipRevised => {
            let ctx = CitingContext::new(corpus, citing);
            let scores = scored.par_iter().map(|&j| revised::score(&ctx, j)).collect();
            (scores, None, citing_note(citing))
        }
        variant => {
            let ctx = CitingContext::new(corpus, citing);
            let scores = scored
                .par_iter()
                .map(|&j| variants::score(&ctx, j, variant))
                .collect::<Result<Vec<_>>>()?;
            (scores, None, citing_note(citing))
        }
    };

    for (s, &j) in scores.iter_mut().zip(&scored) {
        s.flags.is_citing_journal = citing.contains(j);
        s.flags.below_min_pubs = s.m < min_pubs;
    }
    Ok(IndicatorTable::from_scores(
        mode,
        Some(corpus.year()),
        scores,
        median,
        notes,
    ))
}

fn citing_note(citing: &JournalSet) -> String {
    format!("citations counted from {} citing journals", citing.len())
}

const HEADER: [&str; 9] = ["journal_id", "mode", "m", "n", "rip", "dcp", "rdcp", "snip", "flags"];
const CSV_DECIMALS: u32 = 4;

/// Writes `scores.csv`; numbers are rounded half-to-even at 4 decimals and
/// undefined values are empty cells.
pub fn write_scores_csv(out: impl Write, table: &IndicatorTable) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(HEADER)?;
    let cell = |v: &Option<Ratio>| {
        v.as_ref()
            .map(|r| exact::format_half_even(r, CSV_DECIMALS))
            .unwrap_or_default()
    };
    for s in &table.scores {
        w.write_record([
            s.journal.as_str(),
            table.mode.as_str(),
            &s.m.to_string(),
            &s.n.to_string(),
            &cell(&s.rip),
            &cell(&s.dcp),
            &cell(&s.rdcp),
            &cell(&s.snip),
            &s.flags.render(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Reads a `scores.csv` (as written by [`write_scores_csv`] or entered by
/// hand) back into a table.
pub fn read_scores_csv(input: impl Read) -> Result<IndicatorTable> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = reader.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::InvalidValue(format!("scores.csv: missing column `{name}`")))
    };
    let cols: Vec<usize> = HEADER.iter().map(|h| col(h)).collect::<Result<_>>()?;

    let mut mode = None;
    let mut scores = Vec::new();
    for row in reader.records() {
        let row = row?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let get = |i: usize| row.get(cols[i]).unwrap_or("");
        let bad = |what: &str, v: &str| {
            Error::InvalidValue(format!("scores.csv line {line}: bad {what} `{v}`"))
        };
        let row_mode: IndicatorMode = get(1).parse()?;
        match mode {
            None => mode = Some(row_mode),
            Some(m) if m != row_mode => {
                return Err(Error::InvalidValue(format!(
                    "scores.csv line {line}: mode `{row_mode}` differs from `{m}`"
                )))
            }
            _ => {}
        }
        let int = |i: usize, what: &str| get(i).parse::<u64>().map_err(|_| bad(what, get(i)));
        let num = |i: usize, what: &str| -> Result<Option<Ratio>> {
            let v = get(i);
            if v.is_empty() {
                Ok(None)
            } else {
                exact::parse_decimal(v).map(Some).ok_or_else(|| bad(what, v))
            }
        };
        scores.push(JournalScore {
            journal: JournalId(get(0).to_owned()),
            m: int(2, "m")?,
            n: int(3, "n")?,
            rip: num(4, "rip")?,
            dcp: num(5, "dcp")?,
            rdcp: num(6, "rdcp")?,
            snip: num(7, "snip")?,
            flags: ScoreFlags::parse(get(8))?,
        });
    }
    let mode = mode.ok_or_else(|| Error::InvalidValue("scores.csv has no rows".into()))?;
    let table = IndicatorTable::from_scores(mode, None, scores, None, "read from scores.csv".into());
    if let Some(w) = table.scores.windows(2).find(|w| w[0].journal == w[1].journal) {
        return Err(Error::InvalidValue(format!(
            "scores.csv lists journal `{}` twice",
            w[0].journal
        )));
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::merge_title_changes;
    use crate::exact::{integer, ratio};
    use crate::fixtures;

    #[test]
    fn original_table_for_merger_fixture() {
        let c = fixtures::table_merger();
        let t = build_table(&c, IndicatorMode::SnipOriginal, &JournalSet::all(&c), 100).unwrap();
        assert_eq!(t.median_dcp, Some(integer(3)));
        assert_eq!(t.get("X").unwrap().snip, Some(integer(6)));
        assert_eq!(t.get("Y").unwrap().snip, Some(integer(6)));
        assert!(t.get("XY").is_none(), "XY has no publications before the merge");
        assert!(t.get("C").is_none());
        assert!(t.get("X").unwrap().flags.below_min_pubs);

        let merged = merge_title_changes(&c, &fixtures::table_merge_map()).unwrap();
        let t = build_table(&merged, IndicatorMode::SnipOriginal, &JournalSet::all(&merged), 0)
            .unwrap();
        assert_eq!(t.get("XY").unwrap().snip, Some(ratio(27, 5)));
        assert!(!t.get("XY").unwrap().flags.below_min_pubs);
    }

    #[test]
    fn median_property_half_above() {
        let c = fixtures::table_merger();
        let t = build_table(&c, IndicatorMode::SnipOriginal, &JournalSet::all(&c), 0).unwrap();
        // every journal with a defined DCP has a window publication here
        let defined: Vec<_> = t.scores.iter().filter_map(|s| s.rdcp.clone()).collect();
        let one = integer(1);
        let at_or_above = defined.iter().filter(|r| **r >= one).count();
        let at_or_below = defined.iter().filter(|r| **r <= one).count();
        assert!(2 * at_or_above >= defined.len());
        assert!(2 * at_or_below >= defined.len());
    }

    #[test]
    fn weighted_mean() {
        let c = fixtures::table_merger();
        let t = build_table(&c, IndicatorMode::SnipRevised, &JournalSet::all(&c), 0).unwrap();
        let mut num = Ratio::zero();
        let mut den = 0;
        for s in &t.scores {
            num += s.snip.clone().unwrap() * integer(s.m);
            den += s.m;
        }
        assert_eq!(t.weighted_mean_snip, Some(num / integer(den)));
    }

    #[test]
    fn csv_round_trip_and_formatting() {
        let c = fixtures::table_merger();
        let merged = merge_title_changes(&c, &fixtures::table_merge_map()).unwrap();
        let t = build_table(&merged, IndicatorMode::SnipOriginal, &JournalSet::all(&merged), 100)
            .unwrap();
        let mut buf = Vec::new();
        write_scores_csv(&mut buf, &t).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("journal_id,mode,m,n,rip,dcp,rdcp,snip,flags\n"));
        assert!(text.contains("XY,snip-original,20,360,18.0000,10.0000,3.3333,5.4000,citing;below_min_pubs\n"));
        let back = read_scores_csv(buf.as_slice()).unwrap();
        assert_eq!(back.mode, IndicatorMode::SnipOriginal);
        assert_eq!(back.get("XY").unwrap().snip, Some(ratio(54, 10)));
        assert_eq!(back.scores.len(), t.scores.len());
    }

    #[test]
    fn csv_reader_rejects_bad_input() {
        let bad_mode = "journal_id,mode,m,n,rip,dcp,rdcp,snip,flags\nA,nope,1,1,,,,,\n";
        assert!(read_scores_csv(bad_mode.as_bytes()).is_err());
        let mixed = "journal_id,mode,m,n,rip,dcp,rdcp,snip,flags\nA,rip,1,1,1,,,1,\nB,apriori,1,1,1,,,1,\n";
        assert!(read_scores_csv(mixed.as_bytes()).is_err());
        let dup = "journal_id,mode,m,n,rip,dcp,rdcp,snip,flags\nA,rip,1,1,1,,,1,\nA,rip,1,1,1,,,1,\n";
        assert!(read_scores_csv(dup.as_bytes()).is_err());
        let bad_num = "journal_id,mode,m,n,rip,dcp,rdcp,snip,flags\nA,rip,1,1,x,,,1,\n";
        assert!(read_scores_csv(bad_num.as_bytes()).is_err());
        let empty = "journal_id,mode,m,n,rip,dcp,rdcp,snip,flags\n";
        assert!(read_scores_csv(empty.as_bytes()).is_err());
    }

    #[test]
    fn rip_table() {
        let c = fixtures::table_merger();
        let t = build_table(&c, IndicatorMode::Rip, &JournalSet::all(&c), 0).unwrap();
        assert_eq!(t.get("X").unwrap().snip, Some(integer(12)));
        assert_eq!(t.get("Y").unwrap().rip, Some(integer(24)));
    }
}
