//! Writers for the corpus input formats, so generated or hand-built record
//! sets can be fed back through [`super::ingest`].

use std::io::Write;

use super::{JournalRecord, MergeMap, PublicationRecord};
use crate::error::Result;

pub fn write_journals_csv(out: impl Write, journals: &[JournalRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["journal_id", "title", "is_trade"])?;
    for j in journals {
        w.write_record([
            j.journal_id.as_str(),
            j.title.as_str(),
            if j.is_trade { "1" } else { "0" },
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_publications_jsonl(mut out: impl Write, pubs: &[PublicationRecord]) -> Result<()> {
    for p in pubs {
        serde_json::to_writer(&mut out, p)?;
        out.write_all(b"\n").map_err(serde_json::Error::io)?;
    }
    out.flush().map_err(serde_json::Error::io)?;
    Ok(())
}

pub fn write_merges_csv(out: impl Write, merges: &MergeMap) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["old_journal_id", "new_journal_id"])?;
    for (old, new) in merges.iter() {
        w.write_record([old.as_str(), new.as_str()])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
