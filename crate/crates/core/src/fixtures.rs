//! Small hand-built corpora with known indicator values, plus the builder
//! used to write them. They double as regression fixtures for the CLI.

use crate::corpus::{
    ingest_records, Corpus, IngestConfig, JournalRecord, MergeMap, PublicationRecord, Year,
};
use crate::indicators::{read_scores_csv, IndicatorTable};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Accumulates journal and publication records. Publication ids are
/// generated (`<journal>-<year>-<seq>`); a publication created without
/// references gets one unresolvable placeholder reference so it survives
/// the missing-reference-data filter.
#[derive(Debug, Clone)]
pub struct FixtureBuilder {
    year: Year,
    journals: Vec<JournalRecord>,
    pubs: Vec<PublicationRecord>,
}

impl FixtureBuilder {
    pub fn new(year: Year) -> Self {
        FixtureBuilder {
            year,
            journals: Vec::new(),
            pubs: Vec::new(),
        }
    }

    pub fn journal(&mut self, id: &str, is_trade: bool) -> &mut Self {
        self.journals.push(JournalRecord {
            journal_id: id.to_owned(),
            title: format!("Journal {id}"),
            is_trade,
        });
        self
    }

    pub fn publication(&mut self, journal: &str, year: Year, refs: &[&str]) -> String {
        let id = format!("{journal}-{year}-{:05}", self.pubs.len());
        let references = if refs.is_empty() {
            vec![format!("external:{id}")]
        } else {
            refs.iter().map(|r| r.to_string()).collect()
        };
        self.pubs.push(PublicationRecord {
            pub_id: id.clone(),
            journal_id: journal.to_owned(),
            year,
            doc_type: "article".into(),
            references,
            refs_missing: false,
        });
        id
    }

    /// `count` reference-less publications spread round-robin over the
    /// three cited years.
    pub fn window_publications(&mut self, journal: &str, count: usize) -> Vec<String> {
        (0..count)
            .map(|i| self.publication(journal, self.year - 3 + (i % 3) as Year, &[]))
            .collect()
    }

    pub fn records(&self) -> (Vec<JournalRecord>, Vec<PublicationRecord>) {
        (self.journals.clone(), self.pubs.clone())
    }

    pub fn year(&self) -> Year {
        self.year
    }

    pub fn build(&self) -> Corpus {
        let (j, p) = self.records();
        ingest_records(j, p, &IngestConfig::new(self.year))
            .expect("fixture records are valid")
            .0
    }
}

/// Year of analysis used by every fixture below.
pub const FIXTURE_YEAR: Year = 2010;

/// Adds journals whose original DCP is exactly `dcp`: each is cited by
/// `citing_pubs` publications of journal `citer`, each making `dcp`
/// references into the journal's window.
fn add_fillers(b: &mut FixtureBuilder, prefix: &str, count: usize, dcp: usize, citer: &str) {
    for f in 0..count {
        let id = format!("{prefix}{f}");
        b.journal(&id, false);
        let window = b.window_publications(&id, dcp);
        for _ in 0..3 {
            let refs: Vec<&str> = window.iter().map(String::as_str).collect();
            b.publication(citer, FIXTURE_YEAR, &refs);
        }
    }
}

/// Two journals X and Y with 10 publications each, cited 120 and 240 times
/// by publications with 6 and 12 active references; a sink journal S
/// absorbs the remaining active references and four filler journals pin the
/// median original DCP at 3 before and after merging X and Y into `XY`.
///
/// Original SNIP: X 6, Y 6, XY 5.40. Revised SNIP (every journal citing,
/// every p = 1): X 6, Y 6, XY 6 with DCP 2, 4, 3.
pub fn table_merger_builder() -> FixtureBuilder {
    let mut b = FixtureBuilder::new(FIXTURE_YEAR);
    b.journal("X", false);
    b.journal("Y", false);
    b.journal("XY", false);
    b.journal("S", false);
    b.journal("C", false);
    b.journal("FC", false);
    let x = b.window_publications("X", 10);
    let y = b.window_publications("Y", 10);
    let s = b.window_publications("S", 20);
    for i in 0..120 {
        let mut refs = vec![x[i % 10].as_str()];
        refs.extend((0..5).map(|k| s[(i + k) % 20].as_str()));
        b.publication("C", FIXTURE_YEAR, &refs);
    }
    for i in 0..240 {
        let mut refs = vec![y[i % 10].as_str()];
        refs.extend((0..11).map(|k| s[(i + k) % 20].as_str()));
        b.publication("C", FIXTURE_YEAR, &refs);
    }
    add_fillers(&mut b, "F", 4, 3, "FC");
    b
}

pub fn table_merger() -> Corpus {
    table_merger_builder().build()
}

pub fn table_merge_map() -> MergeMap {
    let mut m = MergeMap::new();
    m.insert("X", "XY");
    m.insert("Y", "XY");
    m
}

/// Journal J: 10 publications cited 80 times by publications with 4 active
/// references, median original DCP 2, so original SNIP is 8 / (4 / 2) = 4.
/// With `extra_citation` one more citing publication with 100 active
/// references is added; original SNIP drops to 8.1 / ((420 / 81) / 2).
pub fn additional_citation_builder(extra_citation: bool) -> FixtureBuilder {
    let mut b = FixtureBuilder::new(FIXTURE_YEAR);
    b.journal("J", false);
    b.journal("S", false);
    b.journal("C", false);
    b.journal("FC", false);
    let j = b.window_publications("J", 10);
    let s = b.window_publications("S", 120);
    for i in 0..80 {
        let mut refs = vec![j[i % 10].as_str()];
        refs.extend((0..3).map(|k| s[(3 * i + k) % 120].as_str()));
        b.publication("C", FIXTURE_YEAR, &refs);
    }
    if extra_citation {
        let mut refs = vec![j[0].as_str()];
        refs.extend(s.iter().take(99).map(String::as_str));
        b.publication("C", FIXTURE_YEAR, &refs);
    }
    add_fillers(&mut b, "F", 3, 2, "FC");
    b
}

pub fn additional_citation(extra_citation: bool) -> Corpus {
    additional_citation_builder(extra_citation).build()
}

/// Three continuous journals whose 2010 publications cite every window
/// publication of every journal.
pub fn saturated_selection() -> Corpus {
    let mut b = FixtureBuilder::new(FIXTURE_YEAR);
    let ids = ["A", "B", "C"];
    let mut window = Vec::new();
    for id in ids {
        b.journal(id, false);
        window.extend(b.window_publications(id, 3));
    }
    let refs: Vec<&str> = window.iter().map(String::as_str).collect();
    for id in ids {
        for _ in 0..2 {
            b.publication(id, FIXTURE_YEAR, &refs);
        }
    }
    b.build()
}

/// Four continuous journals. D cites itself and always stays. A has one
/// active publication out of ten (excluded in round 1). B's only active
/// references point at A (excluded in round 2), C's only active references
/// point at B (excluded in round 3).
pub fn cascading_selection_builder() -> FixtureBuilder {
    let mut b = FixtureBuilder::new(FIXTURE_YEAR);
    let mut window = std::collections::BTreeMap::new();
    for id in ["A", "B", "C", "D"] {
        b.journal(id, false);
        window.insert(id, b.window_publications(id, 3));
    }
    let w = |id: &str, i: usize| window[id][i].clone();
    b.publication("D", FIXTURE_YEAR, &[&w("D", 0), &w("D", 1)]);
    b.publication("A", FIXTURE_YEAR, &[&w("D", 2)]);
    for _ in 0..9 {
        b.publication("A", FIXTURE_YEAR, &[]);
    }
    b.publication("B", FIXTURE_YEAR, &[&w("A", 0)]);
    b.publication("B", FIXTURE_YEAR, &[]);
    b.publication("C", FIXTURE_YEAR, &[&w("B", 0), &w("B", 1)]);
    b.publication("C", FIXTURE_YEAR, &[]);
    b
}

pub fn cascading_selection() -> Corpus {
    cascading_selection_builder().build()
}

/// EDGE has exactly 1 of 5 year-of-analysis publications with an active
/// reference (share 0.20); BELOW has 1 of 6.
pub fn threshold_boundary() -> Corpus {
    let mut b = FixtureBuilder::new(FIXTURE_YEAR);
    for id in ["EDGE", "BELOW"] {
        b.journal(id, false);
        let w = b.window_publications(id, 3);
        b.publication(id, FIXTURE_YEAR, &[&w[0]]);
    }
    for _ in 0..4 {
        b.publication("EDGE", FIXTURE_YEAR, &[]);
    }
    for _ in 0..5 {
        b.publication("BELOW", FIXTURE_YEAR, &[]);
    }
    b.build()
}

/// A small random corpus and the ids needed to extend it.
#[derive(Debug, Clone)]
pub struct RandomFixture {
    pub builder: FixtureBuilder,
    /// Journals `J0..` publish in every year and cite.
    pub citing: Vec<String>,
    /// Journals `Q0..` publish only in the cited window.
    pub cited_only: Vec<String>,
    /// Cited-window publication ids per journal, citing journals first.
    pub window: Vec<Vec<String>>,
}

impl RandomFixture {
    pub fn window_of(&self, journal: &str) -> &[String] {
        let i = self
            .citing
            .iter()
            .chain(&self.cited_only)
            .position(|j| j == journal)
            .expect("journal belongs to the fixture");
        &self.window[i]
    }
}

/// Random corpus with 2 to 5 citing journals and `cited_only` journals that
/// never cite. Every journal has at least one cited-window publication;
/// year-of-analysis publications make 0 to 6 references to random window
/// publications, and some also cite an older publication outside the window.
pub fn random_fixture(seed: u64, cited_only: usize) -> RandomFixture {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = FixtureBuilder::new(FIXTURE_YEAR);
    let citing: Vec<String> = (0..rng.random_range(2..=5)).map(|i| format!("J{i}")).collect();
    let cited: Vec<String> = (0..cited_only).map(|i| format!("Q{i}")).collect();
    let mut window = Vec::new();
    let mut old = Vec::new();
    for id in citing.iter().chain(&cited) {
        b.journal(id, false);
        let count = rng.random_range(1..=8);
        window.push(b.window_publications(id, count));
        if rng.random_bool(0.3) {
            old.push(b.publication(id, FIXTURE_YEAR - 5, &[]));
        }
    }
    let pool: Vec<&String> = window.iter().flatten().collect();
    for id in &citing {
        for _ in 0..rng.random_range(1..=6) {
            let k = rng.random_range(0..=6usize);
            let mut refs: Vec<&str> = (0..k).map(|_| pool[rng.random_range(0..pool.len())].as_str()).collect();
            if !old.is_empty() && rng.random_bool(0.2) {
                refs.push(old[rng.random_range(0..old.len())].as_str());
            }
            b.publication(id, FIXTURE_YEAR, &refs);
        }
    }
    RandomFixture {
        builder: b,
        citing,
        cited_only: cited,
        window,
    }
}

/// Copy of `f` plus a journal `NEW` whose year-of-analysis cohort has
/// `total` publications, `active` of them with active references. The first
/// cites one window publication of `target` and makes `r - 1` further
/// references to distinct window publications of other journals; the other
/// active ones each cite one window publication of another journal.
///
/// Returns `None` when the other journals lack the publications needed.
pub fn add_citing_cohort(
    f: &RandomFixture,
    target: &str,
    r: usize,
    active: usize,
    total: usize,
) -> Option<FixtureBuilder> {
    assert!(r >= 1 && active >= 1 && active <= total);
    let others: Vec<&str> = f
        .citing
        .iter()
        .chain(&f.cited_only)
        .filter(|j| j.as_str() != target)
        .flat_map(|j| f.window_of(j).iter().map(String::as_str))
        .collect();
    if r - 1 > others.len() || (active > 1 && others.is_empty()) {
        return None;
    }
    let mut b = f.builder.clone();
    b.journal("NEW", false);
    let mut refs = vec![f.window_of(target).first()?.as_str()];
    refs.extend(&others[..r - 1]);
    b.publication("NEW", FIXTURE_YEAR, &refs);
    for i in 1..active {
        b.publication("NEW", FIXTURE_YEAR, &[others[i % others.len()]]);
    }
    for _ in active..total {
        b.publication("NEW", FIXTURE_YEAR, &[]);
    }
    Some(b)
}

/// Top-30 revised and original scores of a real database year, as printed
/// to two decimals. Publication counts are unknown and set to 100.
pub fn published_top_journals() -> (IndicatorTable, IndicatorTable) {
    let read = |text: &str| read_scores_csv(text.as_bytes()).expect("embedded table parses");
    (read(TOP_REVISED), read(TOP_ORIGINAL))
}

const TOP_REVISED: &str = "\
journal_id,mode,m,n,rip,dcp,rdcp,snip,flags
Academy of Management Review,snip-revised,100,0,,,,5.99,
Acta Crystallographica Section A,snip-revised,100,0,,,,35.47,
Annals of Internal Medicine,snip-revised,100,0,,,,6.07,
Cell,snip-revised,100,0,,,,6.10,
Chemical Reviews,snip-revised,100,0,,,,11.12,
Chemical Society Reviews,snip-revised,100,0,,,,6.26,
Clinical Microbiology Reviews,snip-revised,100,0,,,,8.43,
IEEE Journal on Selected Areas in Communications,snip-revised,100,0,,,,6.36,
IEEE Signal Processing Magazine,snip-revised,100,0,,,,5.92,
IEEE Trans. on Pattern Analysis and Machine Intelligence,snip-revised,100,0,,,,6.91,
IEEE Trans. on Software Engineering,snip-revised,100,0,,,,5.95,
International Journal of Computer Vision,snip-revised,100,0,,,,5.74,
JAMA,snip-revised,100,0,,,,9.37,
Nature,snip-revised,100,0,,,,8.51,
Nature Biotechnology,snip-revised,100,0,,,,6.09,
Nature Genetics,snip-revised,100,0,,,,6.49,
Nature Materials,snip-revised,100,0,,,,8.52,
Nature Nanotechnology,snip-revised,100,0,,,,7.26,
Nature Photonics,snip-revised,100,0,,,,7.19,
Nature Physics,snip-revised,100,0,,,,6.31,
New England Journal of Medicine,snip-revised,100,0,,,,13.35,
Physics Reports,snip-revised,100,0,,,,11.81,
Physiological Reviews,snip-revised,100,0,,,,10.58,
Proceedings of the IEEE,snip-revised,100,0,,,,5.94,
Progress in Polymer Science,snip-revised,100,0,,,,10.03,
Psychological Bulletin,snip-revised,100,0,,,,6.25,
Quarterly Journal of Economics,snip-revised,100,0,,,,6.18,
Reviews of Modern Physics,snip-revised,100,0,,,,27.75,
Science,snip-revised,100,0,,,,7.89,
The Lancet Neurology,snip-revised,100,0,,,,6.76,
";

const TOP_ORIGINAL: &str = "\
journal_id,mode,m,n,rip,dcp,rdcp,snip,flags
ACM Trans. on Graphics,snip-original,100,0,,,,9.04,
Academy of Management Review,snip-original,100,0,,,,9.22,
Acta Crystallographica Section A,snip-original,100,0,,,,29.39,
Cell,snip-original,100,0,,,,9.61,
Chemical Reviews,snip-original,100,0,,,,15.37,
Clinical Microbiology Reviews,snip-original,100,0,,,,8.35,
IEEE Communications Magazine,snip-original,100,0,,,,9.40,
IEEE Journal on Selected Areas in Communications,snip-original,100,0,,,,13.59,
IEEE Signal Processing Magazine,snip-original,100,0,,,,11.51,
IEEE Trans. on Circuits and Systems for Video Technology,snip-original,100,0,,,,8.39,
IEEE Trans. on Energy Conversion,snip-original,100,0,,,,8.81,
IEEE Trans. on Evolutionary Computation,snip-original,100,0,,,,11.30,
IEEE Trans. on Image Processing,snip-original,100,0,,,,8.53,
IEEE Trans. on Industrial Electronics,snip-original,100,0,,,,9.11,
IEEE Trans. on Mobile Computing,snip-original,100,0,,,,8.65,
IEEE Trans. on Pattern Analysis and Machine Intelligence,snip-original,100,0,,,,16.73,
IEEE Trans. on Software Engineering,snip-original,100,0,,,,10.22,
IEEE/ACM Trans. on Networking,snip-original,100,0,,,,8.94,
International Journal of Computer Vision,snip-original,100,0,,,,14.64,
Nature,snip-original,100,0,,,,11.90,
Nature Genetics,snip-original,100,0,,,,9.88,
Nature Materials,snip-original,100,0,,,,11.49,
Nature Nanotechnology,snip-original,100,0,,,,9.36,
New England Journal of Medicine,snip-original,100,0,,,,11.25,
Physics Reports,snip-original,100,0,,,,11.45,
Physiological Reviews,snip-original,100,0,,,,12.76,
Proceedings of the IEEE,snip-original,100,0,,,,9.64,
Progress in Polymer Science,snip-original,100,0,,,,12.08,
Reviews of Modern Physics,snip-original,100,0,,,,29.32,
Science,snip-original,100,0,,,,9.90,
";
