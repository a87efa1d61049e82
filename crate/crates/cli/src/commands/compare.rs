use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use serde::Serialize;
use snip_core::exact::format_f64_half_even;
use snip_core::indicators::{
    compare_tables, read_scores_csv, snip_difference, ComparisonReport, DifferenceEntry,
    DifferenceReport, IndicatorMode, IndicatorTable, ScatterPoint, DEFAULT_MIN_PUBS,
};

use crate::config::Settings;
use crate::manifest::{Inputs, Outcome};

pub const COMPARISON_FILE: &str = "comparison.json";
pub const SCATTER_FILE: &str = "scatter.csv";
pub const TOP_FILE: &str = "top_differences.csv";

#[derive(Args, Debug, Default)]
pub struct CompareArgs {
    /// scores.csv of the first table
    #[arg(long)]
    pub a: Option<PathBuf>,
    /// scores.csv of the second table
    #[arg(long)]
    pub b: Option<PathBuf>,
    /// Journals with fewer cited-window publications are left out [default: 100]
    #[arg(long)]
    pub min_pubs: Option<u64>,
    /// Divisor applied to the original scores before differencing
    /// [default: ratio of the two weighted means]
    #[arg(long)]
    pub diff_factor: Option<f64>,
    /// Journals listed at each end of the difference ranking [default: 10]
    #[arg(long)]
    pub top_n: Option<usize>,
}

#[derive(Serialize)]
struct ComparisonDocument<'a> {
    table_a: String,
    table_b: String,
    /// `true` when the inputs were swapped to put the revised table first.
    swapped: bool,
    comparison: &'a ComparisonReport,
    difference: Option<&'a DifferenceReport>,
}

fn read_table(path: &Path, inputs: &mut Inputs) -> Result<IndicatorTable> {
    let bytes = inputs.read(path)?;
    read_scores_csv(bytes.as_slice()).with_context(|| format!("reading {}", path.display()))
}

fn number(x: f64) -> String {
    format_f64_half_even(x, 4).unwrap_or_default()
}

fn scatter_csv(points: &[ScatterPoint], report: &ComparisonReport) -> Vec<u8> {
    let mut out = format!("journal_id,m,{},{}\n", report.mode_a, report.mode_b);
    for p in points {
        out.push_str(&format!("{},{},{},{}\n", p.journal_id, p.m, number(p.a), number(p.b)));
    }
    out.into_bytes()
}

fn top_csv(report: &DifferenceReport) -> Vec<u8> {
    let mut out = String::from("direction,rank,journal_id,m,revised,original,difference\n");
    let mut rows = |direction: &str, entries: &[DifferenceEntry]| {
        for (i, e) in entries.iter().enumerate() {
            out.push_str(&format!(
                "{direction},{},{},{},{},{},{}\n",
                i + 1,
                e.journal_id,
                e.m,
                number(e.revised),
                number(e.original),
                number(e.difference)
            ));
        }
    };
    rows("positive", &report.top_positive);
    rows("negative", &report.top_negative);
    out.into_bytes()
}

pub fn run(args: CompareArgs, settings: &mut Settings, inputs: &mut Inputs) -> Result<Outcome> {
    let a_path: PathBuf = settings.required("a", args.a)?;
    let b_path: PathBuf = settings.required("b", args.b)?;
    let min_pubs = settings.or("min_pubs", args.min_pubs, DEFAULT_MIN_PUBS)?;
    let factor: Option<f64> = settings.optional("diff_factor", args.diff_factor)?;
    let top_n = settings.or("top_n", args.top_n, 10usize)?;
    if let Some(f) = factor {
        if !(f.is_finite() && f > 0.0) {
            bail!("--diff-factor must be a positive number, got {f}");
        }
    }

    let a = read_table(&a_path, inputs)?;
    let b = read_table(&b_path, inputs)?;
    let swapped = a.mode == IndicatorMode::SnipOriginal && b.mode == IndicatorMode::SnipRevised;
    let (a, b, a_path, b_path) = if swapped { (b, a, b_path, a_path) } else { (a, b, a_path, b_path) };

    let comparison = compare_tables(&a, &b, min_pubs)
        .with_context(|| format!("comparing {} with {}", a_path.display(), b_path.display()))?;
    let difference = if a.mode == IndicatorMode::SnipRevised && b.mode == IndicatorMode::SnipOriginal {
        Some(snip_difference(&a, &b, factor, min_pubs, top_n)?)
    } else if factor.is_some() {
        bail!("--diff-factor needs one snip-revised and one snip-original table");
    } else {
        None
    };

    let mut outcome = Outcome::default();
    outcome.add_json(
        COMPARISON_FILE,
        &ComparisonDocument {
            table_a: a_path.display().to_string(),
            table_b: b_path.display().to_string(),
            swapped,
            comparison: &comparison,
            difference: difference.as_ref(),
        },
    )?;
    outcome.add(SCATTER_FILE, scatter_csv(&comparison.scatter, &comparison));
    match &difference {
        Some(d) => outcome.add(TOP_FILE, top_csv(d)),
        None => outcome.stale.push(TOP_FILE.to_owned()),
    }
    let pearson = comparison.pearson.map_or("undefined".to_owned(), |r| format!("{r:.4}"));
    outcome.summary.push(format!(
        "{} journals compared ({} vs {}), pearson {pearson}",
        comparison.journals_compared, comparison.mode_a, comparison.mode_b
    ));
    Ok(outcome)
}
