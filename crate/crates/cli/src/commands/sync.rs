use std::path::PathBuf;

use anyhow::Result;
use serde::Serialize;

use radlabel::config::PipelineConfig;
use radlabel::io::to_ndjson;
use radlabel::sync::{pair_streams, subsample};

use super::load_index;
use crate::settings::{override_with, require, write};

#[derive(clap::Args)]
pub struct Args {
    /// Camera timestamp index (NDJSON `timestamp_us`, `path`). [paths.images]
    #[arg(long, value_name = "FILE")]
    images: Option<PathBuf>,
    /// Radar timestamp index. [paths.scans]
    #[arg(long, value_name = "FILE")]
    scans: Option<PathBuf>,
    /// Where to write the pairs. [paths.output, default: pairs.ndjson]
    #[arg(long, short, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Largest image/scan offset in microseconds. [sync.max_offset_us, default: 10000]
    #[arg(long)]
    max_offset_us: Option<i64>,
    /// Keep every n-th pair. [sync.subsample, default: 5]
    #[arg(long)]
    subsample: Option<usize>,
}

#[derive(Serialize)]
struct PairRecord<'a> {
    frame_id: usize,
    image_us: i64,
    scan_us: i64,
    offset_us: i64,
    image_path: &'a str,
    scan_path: &'a str,
}

pub fn run(mut cfg: PipelineConfig, args: Args) -> Result<()> {
    override_with(&mut cfg.sync.max_offset_us, args.max_offset_us);
    override_with(&mut cfg.sync.subsample, args.subsample);
    cfg.validate()?;
    let (images, image_index) = load_index(&require(args.images, &cfg.paths.images, "camera index", "images")?, "camera")?;
    let (scans, scan_index) = load_index(&require(args.scans, &cfg.paths.scans, "radar index", "scans")?, "radar")?;
    let out = args.out.or(cfg.paths.output.clone()).unwrap_or_else(|| PathBuf::from("pairs.ndjson"));

    let pairs = pair_streams(&image_index, &scan_index, cfg.sync.max_offset_us);
    let kept = subsample(&pairs, cfg.sync.subsample)?;
    let records: Vec<PairRecord> = kept
        .iter()
        .map(|p| PairRecord {
            frame_id: p.image,
            image_us: p.image_us,
            scan_us: p.scan_us,
            offset_us: p.offset_us(),
            image_path: &images[p.image].path,
            scan_path: &scans[p.scan].path,
        })
        .collect();
    write(&out, to_ndjson(&records)?)?;
    let ratio = if scans.is_empty() { 0.0 } else { kept.len() as f64 / scans.len() as f64 };
    println!(
        "{} images, {} scans, {} pairs within {} us, {} kept (1 in {}); {:.3} of scans retained",
        images.len(),
        scans.len(),
        pairs.len(),
        cfg.sync.max_offset_us,
        kept.len(),
        cfg.sync.subsample,
        ratio
    );
    Ok(())
}
