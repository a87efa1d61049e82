mod common;

use std::fs;

use common::*;
use serde_json::Value;
use snip_core::fixtures::{self, FixtureBuilder, FIXTURE_YEAR};

fn json(path: &std::path::Path) -> Value {
    serde_json::from_slice(&fs::read(path).unwrap()).unwrap()
}

fn compute(corpus: &std::path::Path, out: &std::path::Path, mode: &str) -> std::process::Output {
    snip(&[
        "compute", "--corpus", s(corpus), "--mode", mode, "--citing-set", "all",
        "--min-pubs", "0", "--out-dir", s(out),
    ])
}

#[test]
fn ingest_writes_cache_report_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = ingest_fixture(dir.path(), &fixtures::table_merger_builder(), None);
    let out = corpus.parent().unwrap();
    assert!(corpus.exists());
    assert!(!out.join("warnings.txt").exists());
    let report = json(&out.join("ingest_report.json"));
    assert_eq!(report["year_of_analysis"], FIXTURE_YEAR);
    assert_eq!(report["corpus_hash"], fixtures::table_merger().canonical_hash());
    let manifest = json(&out.join("manifest.json"));
    assert_eq!(manifest["command"], "ingest");
    assert_eq!(manifest["inputs"].as_array().unwrap().len(), 2);
    let outputs: Vec<&str> = manifest["outputs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|o| o["path"].as_str().unwrap())
        .collect();
    assert_eq!(outputs, ["corpus.bin", "ingest_report.json"]);
    assert_eq!(manifest["settings"]["year"], FIXTURE_YEAR);
}

#[test]
fn duplicate_pub_id_fails_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let (jp, pp) = write_fixture(&dir.path().join("in"), &fixtures::table_merger_builder());
    let mut text = fs::read_to_string(&pp).unwrap();
    let first = text.lines().next().unwrap().to_owned();
    text.push_str(&first);
    text.push('\n');
    fs::write(&pp, text).unwrap();
    let out = dir.path().join("out");
    let res = snip(&["ingest", "--journals", s(&jp), "--publications", s(&pp), "--year", "2010", "--out-dir", s(&out)]);
    assert_eq!(code(&res), 2);
    let dup: Value = serde_json::from_str(&first).unwrap();
    assert!(stderr(&res).contains(dup["pub_id"].as_str().unwrap()), "{}", stderr(&res));
    assert!(!out.exists());
}

#[test]
fn missing_journals_file_is_reported_by_path() {
    let dir = tempfile::tempdir().unwrap();
    let (_, pp) = write_fixture(dir.path(), &fixtures::table_merger_builder());
    let missing = dir.path().join("nope").join("journals.csv");
    let res = snip(&["ingest", "--journals", s(&missing), "--publications", s(&pp), "--year", "2010", "--out-dir", s(&dir.path().join("out"))]);
    assert_eq!(code(&res), 2);
    assert!(stderr(&res).contains(&format!("file not found: {}", missing.display())), "{}", stderr(&res));
}

#[test]
fn malformed_records_give_warnings_exit() {
    let dir = tempfile::tempdir().unwrap();
    let (jp, pp) = write_fixture(dir.path(), &fixtures::table_merger_builder());
    let mut text = fs::read_to_string(&pp).unwrap();
    text.push_str("{not json\n");
    fs::write(&pp, text).unwrap();
    let out = dir.path().join("out");
    let res = snip(&["ingest", "--journals", s(&jp), "--publications", s(&pp), "--year", "2010", "--out-dir", s(&out)]);
    assert_eq!(code(&res), 1, "{}", stderr(&res));
    let warnings = fs::read_to_string(out.join("warnings.txt")).unwrap();
    assert_eq!(warnings.lines().count(), 1);
    assert!(out.join("corpus.bin").exists());
}

#[test]
fn compute_reproduces_the_merger_tables() {
    let dir = tempfile::tempdir().unwrap();
    let plain = ingest_fixture(&dir.path().join("plain"), &fixtures::table_merger_builder(), None);
    let merged = ingest_fixture(
        &dir.path().join("merged"),
        &fixtures::table_merger_builder(),
        Some(&fixtures::table_merge_map()),
    );
    let find = |rows: &[(String, String, String)], id: &str| rows.iter().find(|r| r.0 == id).cloned().unwrap();

    let out = dir.path().join("o1");
    assert_eq!(code(&compute(&plain, &out, "snip-original")), 0);
    let rows = score_rows(&out.join("scores.csv"));
    assert_eq!(find(&rows, "X").1, "6.0000");
    assert_eq!(find(&rows, "Y").1, "6.0000");

    let out = dir.path().join("o2");
    assert_eq!(code(&compute(&merged, &out, "snip-original")), 0);
    assert_eq!(find(&score_rows(&out.join("scores.csv")), "XY").1, "5.4000");

    let out = dir.path().join("r1");
    assert_eq!(code(&compute(&plain, &out, "snip-revised")), 0);
    let rows = score_rows(&out.join("scores.csv"));
    assert_eq!((find(&rows, "X").1, find(&rows, "X").2), ("6.0000".into(), "2.0000".into()));
    assert_eq!((find(&rows, "Y").1, find(&rows, "Y").2), ("6.0000".into(), "4.0000".into()));
    assert!(!out.join("selection.json").exists());

    let out = dir.path().join("r2");
    assert_eq!(code(&compute(&merged, &out, "snip-revised")), 0);
    let xy = find(&score_rows(&out.join("scores.csv")), "XY");
    assert_eq!((xy.1, xy.2), ("6.0000".into(), "3.0000".into()));
}

#[test]
fn unknown_mode_is_a_hard_error() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = ingest_fixture(dir.path(), &fixtures::table_merger_builder(), None);
    let out = dir.path().join("out");
    let res = compute(&corpus, &out, "impact-factor");
    assert_eq!(code(&res), 2);
    assert!(!out.exists());
}

#[test]
fn compute_runs_selection_by_default() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = ingest_fixture(dir.path(), &fixtures::cascading_selection_builder(), None);
    let out = dir.path().join("out");
    let res = snip(&["compute", "--corpus", s(&corpus), "--mode", "snip-revised", "--out-dir", s(&out)]);
    assert_eq!(code(&res), 0, "{}", stderr(&res));
    let selection = json(&out.join("selection.json"));
    assert_eq!(selection["included"], serde_json::json!(["D"]));

    // feeding the selection back gives the same table
    let again = dir.path().join("again");
    let sel = out.join("selection.json");
    let res = snip(&["compute", "--corpus", s(&corpus), "--mode", "snip-revised", "--citing-set", s(&sel), "--out-dir", s(&again)]);
    assert_eq!(code(&res), 0, "{}", stderr(&res));
    assert_eq!(fs::read(out.join("scores.csv")).unwrap(), fs::read(again.join("scores.csv")).unwrap());
}

#[test]
fn select_reports_cascading_rounds() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = ingest_fixture(dir.path(), &fixtures::cascading_selection_builder(), None);
    let out = dir.path().join("sel");
    let res = snip(&["select", "--corpus", s(&corpus), "--out-dir", s(&out)]);
    assert_eq!(code(&res), 0, "{}", stderr(&res));
    let doc = json(&out.join("selection.json"));
    assert_eq!(doc["exclusion_round"]["A"], 1);
    assert_eq!(doc["exclusion_round"]["B"], 2);
    assert_eq!(doc["exclusion_round"]["C"], 3);
    assert_eq!(doc["included"], serde_json::json!(["D"]));
}

#[test]
fn selecting_on_an_empty_corpus_fails() {
    let dir = tempfile::tempdir().unwrap();
    let mut b = FixtureBuilder::new(FIXTURE_YEAR);
    b.journal("OLD", false);
    b.window_publications("OLD", 3);
    let corpus = ingest_fixture(dir.path(), &b, None);
    let out = dir.path().join("sel");
    let res = snip(&["select", "--corpus", s(&corpus), "--out-dir", s(&out)]);
    assert_eq!(code(&res), 2);
    assert!(!out.exists());
}

#[test]
fn self_comparison_correlates_perfectly() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = ingest_fixture(dir.path(), &fixtures::table_merger_builder(), None);
    let scores = dir.path().join("scores");
    assert_eq!(code(&compute(&corpus, &scores, "snip-revised")), 0);
    let table = scores.join("scores.csv");
    let out = dir.path().join("cmp");
    let res = snip(&["compare", "--a", s(&table), "--b", s(&table), "--min-pubs", "0", "--out-dir", s(&out)]);
    assert_eq!(code(&res), 0, "{}", stderr(&res));
    let doc = json(&out.join("comparison.json"));
    assert!((doc["comparison"]["pearson"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!(doc["difference"].is_null());
    assert!(!out.join("top_differences.csv").exists());
    assert!(out.join("scatter.csv").exists());
}

#[test]
fn published_tables_rank_acta_crystallographica_first() {
    let dir = tempfile::tempdir().unwrap();
    let (revised, original) = fixtures::published_top_journals();
    let (rp, op) = (dir.path().join("revised.csv"), dir.path().join("original.csv"));
    write_table(&rp, &revised);
    write_table(&op, &original);
    let out = dir.path().join("cmp");
    // original first: the inputs are swapped so the revised table leads
    let res = snip(&["compare", "--a", s(&op), "--b", s(&rp), "--diff-factor", "1.26", "--top-n", "5", "--out-dir", s(&out)]);
    assert_eq!(code(&res), 0, "{}", stderr(&res));
    let doc = json(&out.join("comparison.json"));
    assert_eq!(doc["swapped"], true);
    let top = fs::read_to_string(out.join("top_differences.csv")).unwrap();
    let first = top.lines().nth(1).unwrap();
    assert!(first.starts_with("positive,1,Acta Crystallographica Section A,"), "{first}");
    assert_eq!(top.lines().count(), 11);
}

#[test]
fn disjoint_tables_cannot_be_compared() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let header = "journal_id,mode,m,n,rip,dcp,rdcp,snip,flags\n";
    fs::write(&a, format!("{header}A1,rip,5,5,1.0000,,,1.0000,\nA2,rip,5,10,2.0000,,,2.0000,\n")).unwrap();
    fs::write(&b, format!("{header}B1,rip,5,5,1.0000,,,1.0000,\nB2,rip,5,10,2.0000,,,2.0000,\n")).unwrap();
    let out = dir.path().join("cmp");
    let res = snip(&["compare", "--a", s(&a), "--b", s(&b), "--min-pubs", "0", "--out-dir", s(&out)]);
    assert_eq!(code(&res), 2);
    assert!(!out.exists());
}

fn spec_json(growth: f64, zero: f64) -> String {
    serde_json::json!({
        "year_of_analysis": 2012,
        "seed": 11,
        "fields": [
            {
                "name": "a",
                "n_cited_journals": 3,
                "pubs_per_journal_per_year": 20,
                "ref_count_distribution": {"kind": "weighted", "weights": [[0, zero], [1, 0.3], [50, 0.2]]},
                "growth_factor": growth
            },
            {
                "name": "b",
                "n_cited_journals": 2,
                "pubs_per_journal_per_year": {"min": 10, "max": 15},
                "ref_count_distribution": {"kind": "uniform", "min": 1, "max": 4}
            }
        ]
    })
    .to_string()
}

#[test]
fn simulate_reports_unit_field_means() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    fs::write(&spec, spec_json(1.0, 0.5)).unwrap();
    let out = dir.path().join("sim");
    let res = snip(&["simulate", "--spec", s(&spec), "--export", "--out-dir", s(&out)]);
    assert!(code(&res) <= 1, "{}", stderr(&res));
    let doc = json(&out.join("simulation.json"));
    for f in doc["fields"].as_array().unwrap() {
        assert_eq!(f["mu_exact"], "1", "{f}");
    }
    assert!(out.join("bias_report.json").exists());

    // the exported world reingests to the same corpus
    let ing = dir.path().join("ing");
    let res = snip(&[
        "ingest", "--journals", s(&out.join("journals.csv")), "--publications",
        s(&out.join("publications.jsonl")), "--year", "2012", "--out-dir", s(&ing),
    ]);
    assert_eq!(code(&res), 0, "{}", stderr(&res));
    assert_eq!(json(&ing.join("ingest_report.json"))["corpus_hash"], doc["corpus_hash"]);
}

#[test]
fn simulate_growth_matches_counts() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    fs::write(&spec, spec_json(1.3, 0.2)).unwrap();
    let out = dir.path().join("sim");
    let res = snip(&["simulate", "--spec", s(&spec), "--out-dir", s(&out)]);
    assert!(code(&res) <= 1, "{}", stderr(&res));
    let grown = &json(&out.join("simulation.json"))["fields"][0];
    let (m1, m2) = (grown["m1"].as_f64().unwrap(), grown["m2"].as_f64().unwrap());
    assert!((grown["mu"].as_f64().unwrap() - 3.0 * m2 / m1).abs() < 1e-9);
    assert!(grown["mu"].as_f64().unwrap() > 1.0);
}

#[test]
fn infeasible_spec_is_a_hard_error() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    fs::write(
        &spec,
        r#"{"year_of_analysis": 2010, "seed": 1, "fields": [{"n_cited_journals": 0,
            "pubs_per_journal_per_year": 5, "ref_count_distribution": {"kind": "constant", "r": 2}}]}"#,
    )
    .unwrap();
    let out = dir.path().join("sim");
    let res = snip(&["simulate", "--spec", s(&spec), "--out-dir", s(&out)]);
    assert_eq!(code(&res), 2);
    assert!(stderr(&res).contains("infeasible"), "{}", stderr(&res));
    assert!(!out.exists());
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = ingest_fixture(dir.path(), &fixtures::table_merger_builder(), None);
    let cfg = dir.path().join("run.toml");
    fs::write(
        &cfg,
        format!(
            "corpus = \"{}\"\nmode = \"rip\"\nciting-set = \"all\"\nmin_pubs = 0\nout_dir = \"from-config\"\n",
            corpus.strip_prefix(dir.path()).unwrap().display()
        ),
    )
    .unwrap();
    let res = snip(&["--config", s(&cfg), "compute", "--mode", "snip-revised"]);
    assert_eq!(code(&res), 0, "{}", stderr(&res));
    let out = dir.path().join("from-config");
    assert!(fs::read_to_string(out.join("scores.csv")).unwrap().contains(",snip-revised,"));
    let manifest = json(&out.join("manifest.json"));
    assert_eq!(manifest["settings"]["mode"], "snip-revised");
    assert_eq!(manifest["settings"]["min_pubs"], 0);
    // the config file itself is a hashed input
    assert_eq!(manifest["inputs"].as_array().unwrap().len(), 2);

    fs::write(&cfg, "colour = \"red\"\n").unwrap();
    let res = snip(&["--config", s(&cfg), "compute", "--corpus", s(&corpus), "--mode", "rip"]);
    assert_eq!(code(&res), 2);
}

#[test]
fn repeated_runs_give_identical_scores() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = ingest_fixture(dir.path(), &fixtures::table_merger_builder(), None);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(code(&compute(&corpus, &a, "audience-factor")), 0);
    assert_eq!(code(&snip(&["--threads", "1", "compute", "--corpus", s(&corpus), "--mode", "audience-factor", "--citing-set", "all", "--min-pubs", "0", "--out-dir", s(&b)])), 0);
    assert_eq!(fs::read(a.join("scores.csv")).unwrap(), fs::read(b.join("scores.csv")).unwrap());
}
