//! Helpers shared by the binary-level test targets.
#![allow(dead_code)]

use std::fs::{self, File};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use snip_core::corpus::{write_journals_csv, write_merges_csv, write_publications_jsonl, MergeMap};
use snip_core::fixtures::FixtureBuilder;
use snip_core::indicators::{write_scores_csv, IndicatorTable};

pub fn snip(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_snip"))
        .args(args)
        .output()
        .expect("snip binary runs")
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

pub fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

pub fn s(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

/// Writes `journals.csv` and `publications.jsonl` for `b` under `dir`.
pub fn write_fixture(dir: &Path, b: &FixtureBuilder) -> (PathBuf, PathBuf) {
    fs::create_dir_all(dir).unwrap();
    let (journals, pubs) = b.records();
    let jp = dir.join("journals.csv");
    let pp = dir.join("publications.jsonl");
    write_journals_csv(File::create(&jp).unwrap(), &journals).unwrap();
    write_publications_jsonl(File::create(&pp).unwrap(), &pubs).unwrap();
    (jp, pp)
}

pub fn write_merges(dir: &Path, merges: &MergeMap) -> PathBuf {
    let path = dir.join("merges.csv");
    write_merges_csv(File::create(&path).unwrap(), merges).unwrap();
    path
}

pub fn write_table(path: &Path, table: &IndicatorTable) {
    write_scores_csv(File::create(path).unwrap(), table).unwrap();
}

/// Runs `snip ingest` on `b` and returns the corpus cache path.
pub fn ingest_fixture(dir: &Path, b: &FixtureBuilder, merges: Option<&MergeMap>) -> PathBuf {
    let (jp, pp) = write_fixture(&dir.join("input"), b);
    let out = dir.join("ingest");
    let year = b.year().to_string();
    let mut args = vec!["ingest", "--journals", s(&jp), "--publications", s(&pp), "--year", &year];
    let merges_path = merges.map(|m| write_merges(&dir.join("input"), m));
    if let Some(m) = &merges_path {
        args.extend(["--merges", s(m)]);
    }
    args.extend(["--out-dir", s(&out)]);
    let res = snip(&args);
    assert_eq!(code(&res), 0, "{}", stderr(&res));
    out.join("corpus.bin")
}

/// Rows of a scores.csv as `(journal_id, snip, dcp)` strings.
pub fn score_rows(path: &Path) -> Vec<(String, String, String)> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name).unwrap();
    let (id, snip, dcp) = (col("journal_id"), col("snip"), col("dcp"));
    lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[id].to_owned(), f[snip].to_owned(), f[dcp].to_owned())
        })
        .collect()
}
