//! Reading `journals.csv` and `publications.jsonl` into a [`Corpus`].
//!
//! Per-record problems (unparsable line, bad `is_trade` value) are collected
//! in the [`IngestReport`] and ingestion continues. A duplicate `pub_id` is
//! the only hard error: the corpus would be ambiguous.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::io::{BufRead, Read};

use serde::{Deserialize, Serialize};

use super::{Corpus, DocType, Journal, JournalId, JournalIdx, PubId, PubIdx, Publication, Year};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct IngestConfig {
    pub year_of_analysis: Year,
    pub doc_types: BTreeSet<DocType>,
}

impl IngestConfig {
    pub fn new(year_of_analysis: Year) -> Self {
        IngestConfig {
            year_of_analysis,
            doc_types: DocType::default_allowlist(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JournalRecord {
    pub journal_id: String,
    pub title: String,
    pub is_trade: bool,
}

/// One line of `publications.jsonl`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PublicationRecord {
    pub pub_id: String,
    pub journal_id: String,
    pub year: Year,
    pub doc_type: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub references: Vec<String>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub refs_missing: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordError {
    pub source: String,
    pub line: u64,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub journal_rows_read: usize,
    pub journals: usize,
    pub publications_read: usize,
    pub publications_kept: usize,
    pub doc_type_dropped: usize,
    pub no_references_dropped: usize,
    pub unresolved_journal_dropped: usize,
    pub references_read: usize,
    pub references_kept: usize,
    pub unresolved_reference_dropped: usize,
    pub self_reference_dropped: usize,
    pub duplicate_reference_dropped: usize,
    pub record_errors: Vec<RecordError>,
}

impl IngestReport {
    pub fn has_warnings(&self) -> bool {
        !self.record_errors.is_empty()
    }
}

const JOURNALS_SOURCE: &str = "journals.csv";
const PUBLICATIONS_SOURCE: &str = "publications.jsonl";

/// Streams both inputs and builds the corpus.
pub fn ingest(
    journals: impl Read,
    publications: impl BufRead,
    config: &IngestConfig,
) -> Result<(Corpus, IngestReport)> {
    let mut report = IngestReport::default();
    let journal_records = read_journals(journals, &mut report)?;
    let pub_records = read_publications(publications, &mut report)?;
    build(journal_records, pub_records, config, report)
}

/// Same as [`ingest`] for records already in memory.
pub fn ingest_records(
    journals: Vec<JournalRecord>,
    publications: Vec<PublicationRecord>,
    config: &IngestConfig,
) -> Result<(Corpus, IngestReport)> {
    let report = IngestReport {
        journal_rows_read: journals.len(),
        ..Default::default()
    };
    let journals = journals.into_iter().zip(2u64..).map(|(r, l)| (l, r)).collect();
    let publications = publications
        .into_iter()
        .zip(1u64..)
        .map(|(r, l)| (l, r))
        .collect();
    build(journals, publications, config, report)
}

fn read_journals(input: impl Read, report: &mut IngestReport) -> Result<Vec<(u64, JournalRecord)>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);

    let headers = reader.headers()?.clone();
    let column = |name: &str| headers.iter().position(|h| h == name);
    let (Some(id_col), Some(title_col), Some(trade_col)) =
        (column("journal_id"), column("title"), column("is_trade"))
    else {
        return Err(Error::InvalidValue(format!(
            "{JOURNALS_SOURCE}: header must contain journal_id,title,is_trade (got `{}`)",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    };

    let mut out = Vec::new();
    for row in reader.records() {
        report.journal_rows_read += 1;
        let row = match row {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                report.record_errors.push(RecordError {
                    source: JOURNALS_SOURCE.into(),
                    line,
                    message: e.to_string(),
                });
                continue;
            }
        };
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let mut fail = |message: String| {
            report.record_errors.push(RecordError {
                source: JOURNALS_SOURCE.into(),
                line,
                message,
            })
        };
        let (Some(id), Some(title), Some(trade)) =
            (row.get(id_col), row.get(title_col), row.get(trade_col))
        else {
            fail(format!("expected 3 columns, found {}", row.len()));
            continue;
        };
        if id.is_empty() {
            fail("empty journal_id".into());
            continue;
        }
        let is_trade = match trade {
            "0" => false,
            "1" => true,
            other => {
                fail(format!("is_trade must be 0 or 1, found `{other}`"));
                continue;
            }
        };
        out.push((
            line,
            JournalRecord {
                journal_id: id.to_owned(),
                title: title.to_owned(),
                is_trade,
            },
        ));
    }
    Ok(out)
}

fn read_publications(
    input: impl BufRead,
    report: &mut IngestReport,
) -> Result<Vec<(u64, PublicationRecord)>> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line_no = i as u64 + 1;
        let line = line.map_err(|e| Error::io(PUBLICATIONS_SOURCE, e))?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<PublicationRecord>(&line) {
            Ok(rec) => out.push((line_no, rec)),
            Err(e) => {
                report.publications_read += 1;
                report.record_errors.push(RecordError {
                    source: PUBLICATIONS_SOURCE.into(),
                    line: line_no,
                    message: e.to_string(),
                });
            }
        }
    }
    Ok(out)
}

struct JournalDraft {
    titles: Vec<String>,
    is_trade: bool,
}

enum Drop {
    DocType,
    NoReferences,
    UnknownJournal,
}

fn build(
    journal_records: Vec<(u64, JournalRecord)>,
    pub_records: Vec<(u64, PublicationRecord)>,
    config: &IngestConfig,
    mut report: IngestReport,
) -> Result<(Corpus, IngestReport)> {
    let mut drafts: BTreeMap<String, JournalDraft> = BTreeMap::new();
    for (line, rec) in journal_records {
        match drafts.get_mut(&rec.journal_id) {
            Some(d) => {
                if d.is_trade != rec.is_trade {
                    report.record_errors.push(RecordError {
                        source: JOURNALS_SOURCE.into(),
                        line,
                        message: format!(
                            "journal `{}` listed again with a different is_trade flag; keeping the first",
                            rec.journal_id
                        ),
                    });
                }
                if !d.titles.contains(&rec.title) {
                    d.titles.push(rec.title);
                }
            }
            None => {
                drafts.insert(
                    rec.journal_id,
                    JournalDraft {
                        titles: vec![rec.title],
                        is_trade: rec.is_trade,
                    },
                );
            }
        }
    }

    let journals: Vec<Journal> = drafts
        .into_iter()
        .map(|(id, d)| Journal {
            id: JournalId(id),
            titles: d.titles,
            is_trade: d.is_trade,
            predecessor_ids: Vec::new(),
        })
        .collect();
    let journal_idx: HashMap<&str, JournalIdx> = journals
        .iter()
        .enumerate()
        .map(|(i, j)| (j.id.as_str(), JournalIdx(i as u32)))
        .collect();

    // Duplicate detection runs over every raw record, filtered or not.
    let mut seen: HashSet<&str> = HashSet::with_capacity(pub_records.len());
    for (_, rec) in &pub_records {
        if !seen.insert(rec.pub_id.as_str()) {
            return Err(Error::DuplicatePubId(rec.pub_id.clone()));
        }
    }
    drop(seen);

    let mut kept: Vec<(PublicationRecord, JournalIdx, DocType)> = Vec::new();
    for (_, rec) in pub_records {
        report.publications_read += 1;
        let doc_type = DocType::new(&rec.doc_type);
        let verdict = if !config.doc_types.contains(&doc_type) {
            Some(Drop::DocType)
        } else if rec.refs_missing || rec.references.is_empty() {
            Some(Drop::NoReferences)
        } else if !journal_idx.contains_key(rec.journal_id.as_str()) {
            Some(Drop::UnknownJournal)
        } else {
            None
        };
        match verdict {
            Some(Drop::DocType) => report.doc_type_dropped += 1,
            Some(Drop::NoReferences) => report.no_references_dropped += 1,
            Some(Drop::UnknownJournal) => report.unresolved_journal_dropped += 1,
            None => {
                let j = journal_idx[rec.journal_id.as_str()];
                kept.push((rec, j, doc_type));
            }
        }
    }
    kept.sort_by(|a, b| a.0.pub_id.cmp(&b.0.pub_id));

    let pub_idx: HashMap<&str, PubIdx> = kept
        .iter()
        .enumerate()
        .map(|(i, (r, _, _))| (r.pub_id.as_str(), PubIdx(i as u32)))
        .collect();

    let mut resolved: Vec<(Vec<PubIdx>, u32)> = Vec::with_capacity(kept.len());
    for (rec, _, _) in &kept {
        let mut targets = Vec::with_capacity(rec.references.len());
        let mut distinct_raw: HashSet<&str> = HashSet::with_capacity(rec.references.len());
        for raw in &rec.references {
            report.references_read += 1;
            if *raw == rec.pub_id {
                report.self_reference_dropped += 1;
                continue;
            }
            if !distinct_raw.insert(raw.as_str()) {
                report.duplicate_reference_dropped += 1;
                continue;
            }
            match pub_idx.get(raw.as_str()) {
                Some(&t) => targets.push(t),
                None => report.unresolved_reference_dropped += 1,
            }
        }
        targets.sort_unstable();
        report.references_kept += targets.len();
        resolved.push((targets, distinct_raw.len() as u32));
    }
    drop(pub_idx);

    let publications: Vec<Publication> = kept
        .into_iter()
        .zip(resolved)
        .map(|((rec, journal, doc_type), (references, raw_reference_count))| Publication {
            id: PubId(rec.pub_id),
            journal,
            year: rec.year,
            doc_type,
            references,
            raw_reference_count,
        })
        .collect();

    report.journals = journals.len();
    report.publications_kept = publications.len();
    let corpus = Corpus::from_parts(
        config.year_of_analysis,
        config.doc_types.clone(),
        journals,
        publications,
    );
    Ok((corpus, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::JournalSet;

    fn pub_line(id: &str, journal: &str, year: Year, doc: &str, refs: &[&str]) -> String {
        serde_json::json!({
            "pub_id": id, "journal_id": journal, "year": year, "doc_type": doc, "references": refs
        })
        .to_string()
    }

    fn run(journals: &str, pubs: &[String]) -> Result<(Corpus, IngestReport)> {
        let text = pubs.join("\n");
        ingest(journals.as_bytes(), text.as_bytes(), &IngestConfig::new(2010))
    }

    const JOURNALS: &str = "journal_id,title,is_trade\nA,Alpha,0\nB,Beta,0\nT,Trade Weekly,1\n";

    #[test]
    fn empty_streams() {
        let (c, r) = run("journal_id,title,is_trade\n", &[]).unwrap();
        assert_eq!(c.num_journals(), 0);
        assert_eq!(c.num_publications(), 0);
        assert_eq!(r, IngestReport::default());
    }

    #[test]
    fn editorial_is_dropped() {
        let pubs = vec![
            pub_line("p1", "A", 2009, "article", &["x"]),
            pub_line("p2", "A", 2009, "editorial", &["x"]),
        ];
        let (c, r) = run(JOURNALS, &pubs).unwrap();
        assert_eq!(c.num_publications(), 1);
        assert_eq!(r.doc_type_dropped, 1);
        assert!(c.pub_idx("p2").is_none());
    }

    #[test]
    fn duplicate_pub_id_is_hard_error() {
        let pubs = vec![
            pub_line("p1", "A", 2009, "article", &["x"]),
            pub_line("p2", "A", 2009, "article", &["x"]),
            pub_line("p3", "B", 2009, "review", &["x"]),
            pub_line("p4", "B", 2010, "article", &["p1"]),
            pub_line("p5", "B", 2010, "article", &["p2"]),
            pub_line("p3", "A", 2010, "editorial", &["p1"]),
        ];
        let err = run(JOURNALS, &pubs).unwrap_err();
        assert!(matches!(err, Error::DuplicatePubId(ref id) if id == "p3"));
        assert!(err.to_string().contains("p3"));
    }

    #[test]
    fn reference_cleaning() {
        let pubs = vec![
            pub_line("t", "A", 2008, "article", &["ext"]),
            pub_line("c", "B", 2010, "article", &["t", "t", "c", "missing"]),
        ];
        let (c, r) = run(JOURNALS, &pubs).unwrap();
        let p = c.publication(c.pub_idx("c").unwrap());
        assert_eq!(p.references, vec![c.pub_idx("t").unwrap()]);
        assert_eq!(p.raw_reference_count, 2);
        assert_eq!(r.duplicate_reference_dropped, 1);
        assert_eq!(r.self_reference_dropped, 1);
        assert_eq!(r.unresolved_reference_dropped, 2); // "ext" and "missing"
        assert_eq!(r.references_read, 5);
        assert_eq!(r.references_kept, 1);
    }

    #[test]
    fn missing_reference_data_and_unknown_journal() {
        let missing = serde_json::json!({
            "pub_id": "m", "journal_id": "A", "year": 2010, "doc_type": "article", "refs_missing": true
        })
        .to_string();
        let pubs = vec![
            missing,
            pub_line("e", "A", 2010, "article", &[]),
            pub_line("u", "Z", 2010, "article", &["x"]),
            pub_line("k", "A", 2010, "article", &["x"]),
        ];
        let (c, r) = run(JOURNALS, &pubs).unwrap();
        assert_eq!(r.no_references_dropped, 2);
        assert_eq!(r.unresolved_journal_dropped, 1);
        assert_eq!(c.num_publications(), 1);
    }

    #[test]
    fn malformed_records_are_reported_with_line_numbers() {
        let journals = "journal_id,title,is_trade\nA,Alpha,0\nB,Beta,yes\n";
        let pubs = vec![
            pub_line("p1", "A", 2009, "article", &["x"]),
            "{not json".to_owned(),
            pub_line("p2", "A", 2010, "article", &["p1"]),
        ];
        let (c, r) = run(journals, &pubs).unwrap();
        assert_eq!(c.num_journals(), 1);
        assert_eq!(c.num_publications(), 2);
        assert_eq!(r.record_errors.len(), 2);
        assert_eq!(r.record_errors[0].source, "journals.csv");
        assert_eq!(r.record_errors[0].line, 3);
        assert_eq!(r.record_errors[1].source, "publications.jsonl");
        assert_eq!(r.record_errors[1].line, 2);
    }

    #[test]
    fn citations_received_counts_each_reference() {
        // Two citing pubs with 2 and 3 qualifying references into A's window.
        let mut pubs: Vec<String> = (0..5)
            .map(|i| pub_line(&format!("a{i}"), "A", 2007 + (i % 3), "article", &["x"]))
            .collect();
        pubs.push(pub_line("old", "A", 2005, "article", &["x"]));
        pubs.push(pub_line("c1", "B", 2010, "article", &["a0", "a1", "old"]));
        pubs.push(pub_line("c2", "B", 2010, "article", &["a2", "a3", "a4"]));
        let (c, _) = run(JOURNALS, &pubs).unwrap();
        let all = JournalSet::all(&c);
        let events = c.citations_received("A", &all).unwrap();
        assert_eq!(events.len(), 5);
        assert!(c.citations_received("B", &all).unwrap().is_empty());
        assert!(c.citations_received("nope", &all).is_err());

        let only_a = JournalSet::from_indices(&c, c.journal_idx("A"));
        assert!(c.citations_received("A", &only_a).unwrap().is_empty());
    }

    #[test]
    fn input_order_does_not_change_hash() {
        let pubs = vec![
            pub_line("p1", "A", 2009, "article", &["x"]),
            pub_line("p2", "B", 2010, "article", &["p1", "x"]),
            pub_line("p3", "B", 2010, "review", &["p2", "p1"]),
        ];
        let mut rev = pubs.clone();
        rev.reverse();
        let j2 = "journal_id,title,is_trade\nT,Trade Weekly,1\nB,Beta,0\nA,Alpha,0\n";
        let (a, _) = run(JOURNALS, &pubs).unwrap();
        let (b, _) = run(j2, &rev).unwrap();
        assert_eq!(a.canonical_hash(), b.canonical_hash());
    }
}
