//! Run manifest and output writing.

use std::collections::BTreeMap;
use std::fs;
use std::io::ErrorKind;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileRecord {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

impl FileRecord {
    fn new(path: String, contents: &[u8]) -> Self {
        FileRecord {
            path,
            sha256: hex::encode(Sha256::digest(contents)),
            bytes: contents.len() as u64,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub command_line: Vec<String>,
    pub settings: BTreeMap<String, Value>,
    pub inputs: Vec<FileRecord>,
    /// Paths relative to the output directory, in write order.
    pub outputs: Vec<FileRecord>,
    pub warnings: Vec<String>,
    pub started_at: String,
    pub finished_at: String,
}

/// Every file read by a command, hashed from the same bytes that were
/// parsed.
#[derive(Default)]
pub struct Inputs(Vec<FileRecord>);

impl Inputs {
    pub fn read(&mut self, path: &Path) -> Result<Vec<u8>> {
        let bytes = match fs::read(path) {
            Ok(b) => b,
            Err(e) if e.kind() == ErrorKind::NotFound => {
                bail!("file not found: {}", path.display())
            }
            Err(e) => return Err(e).with_context(|| format!("reading {}", path.display())),
        };
        self.0.push(FileRecord::new(path.display().to_string(), &bytes));
        Ok(bytes)
    }
}

/// What a command produced, held in memory until everything has been
/// validated.
#[derive(Default)]
pub struct Outcome {
    pub outputs: Vec<(String, Vec<u8>)>,
    /// Files a previous run may have left that this run does not produce.
    pub stale: Vec<String>,
    pub warnings: Vec<String>,
    /// Short human-readable result lines for stdout.
    pub summary: Vec<String>,
}

impl Outcome {
    pub fn add(&mut self, name: &str, bytes: Vec<u8>) {
        self.outputs.push((name.to_owned(), bytes));
    }

    pub fn add_json(&mut self, name: &str, value: &impl Serialize) -> Result<()> {
        let mut bytes = serde_json::to_vec_pretty(value)?;
        bytes.push(b'\n');
        self.add(name, bytes);
        Ok(())
    }
}

pub struct Run {
    pub command: String,
    pub settings: BTreeMap<String, Value>,
    pub inputs: Inputs,
    pub started: DateTime<Utc>,
}

fn timestamp(t: DateTime<Utc>) -> String {
    t.to_rfc3339_opts(SecondsFormat::Millis, true)
}

/// Writes the outputs and then `manifest.json` into `out_dir`.
pub fn write_outputs(out_dir: &Path, run: Run, outcome: &Outcome) -> Result<PathBuf> {
    fs::create_dir_all(out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;
    for name in &outcome.stale {
        let path = out_dir.join(name);
        match fs::remove_file(&path) {
            Err(e) if e.kind() != ErrorKind::NotFound => {
                return Err(e).with_context(|| format!("removing {}", path.display()))
            }
            _ => {}
        }
    }
    let mut outputs = Vec::with_capacity(outcome.outputs.len());
    for (name, bytes) in &outcome.outputs {
        let path = out_dir.join(name);
        fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        outputs.push(FileRecord::new(name.clone(), bytes));
    }
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME").to_owned(),
        version: env!("CARGO_PKG_VERSION").to_owned(),
        command: run.command,
        command_line: std::env::args().collect(),
        settings: run.settings,
        inputs: run.inputs.0,
        outputs,
        warnings: outcome.warnings.clone(),
        started_at: timestamp(run.started),
        finished_at: timestamp(Utc::now()),
    };
    let path = out_dir.join(MANIFEST_FILE);
    let mut bytes = serde_json::to_vec_pretty(&manifest)?;
    bytes.push(b'\n');
    fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}
