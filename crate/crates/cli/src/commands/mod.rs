pub mod anchors;
pub mod evaluate;
pub mod label;
pub mod radar;
pub mod simulate;
pub mod stats;
pub mod sync;

use anyhow::{Context, Result};
use radlabel::io::IndexEntry;
use radlabel::sync::TimedIndex;

/// Parses a timestamp index file into entries and a validated time index.
pub fn load_index(path: &std::path::Path, stream: &str) -> Result<(Vec<IndexEntry>, TimedIndex)> {
    let entries = radlabel::io::parse_index(&crate::settings::read(path)?)
        .with_context(|| format!("parsing {}", path.display()))?;
    let index = TimedIndex::new(stream, entries.iter().map(|e| e.timestamp_us).collect())
        .with_context(|| format!("timestamps in {}", path.display()))?;
    Ok((entries, index))
}
