use std::path::PathBuf;

use anyhow::{Context, Result};
use log::{info, warn};
use rayon::prelude::*;

use radlabel::config::PipelineConfig;
use radlabel::io::{parse_ego_track, parse_scans};
use radlabel::radar::{render_channels, RadarChannels};
use radlabel::sync::{nearest_ego, pair_streams, TimedIndex};
use radlabel::Calibration;

use super::load_index;
use crate::settings::{override_with, read, require, write};

#[derive(clap::Args)]
pub struct Args {
    /// Calibration JSON. [paths.calibration]
    #[arg(long, value_name = "FILE")]
    calibration: Option<PathBuf>,
    /// Radar scans (NDJSON, one target per line). [paths.scans]
    #[arg(long, value_name = "FILE")]
    scans: Option<PathBuf>,
    /// Ego-motion track (NDJSON). [paths.ego_track]
    #[arg(long, value_name = "FILE")]
    ego: Option<PathBuf>,
    /// Camera timestamp index; one channel pair is written per entry. [paths.images]
    #[arg(long, value_name = "FILE")]
    images: Option<PathBuf>,
    /// Output directory for `<frame_id>.range.pgm` / `<frame_id>.rate.pgm`. [paths.output, default: channels]
    #[arg(long, short, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Disc radius in pixels. [radar.radius_px, default: 2]
    #[arg(long)]
    radius: Option<u32>,
    /// Range mapped to pixel 255, metres. [radar.encoding.max_range_m, default: 100]
    #[arg(long)]
    max_range: Option<f64>,
    /// Pixel values per m/s of range rate. [radar.encoding.rate_scale, default: 5]
    #[arg(long)]
    rate_scale: Option<f64>,
    /// Largest image/scan offset in microseconds. [sync.max_offset_us, default: 10000]
    #[arg(long)]
    max_offset_us: Option<i64>,
}

pub fn run(mut cfg: PipelineConfig, args: Args) -> Result<()> {
    override_with(&mut cfg.radar.radius_px, args.radius);
    override_with(&mut cfg.radar.encoding.max_range_m, args.max_range);
    override_with(&mut cfg.radar.encoding.rate_scale, args.rate_scale);
    override_with(&mut cfg.sync.max_offset_us, args.max_offset_us);
    cfg.validate()?;
    let calib = Calibration::load(&require(args.calibration, &cfg.paths.calibration, "calibration", "calibration")?)?;
    let scans_path = require(args.scans, &cfg.paths.scans, "radar scans", "scans")?;
    let scans = parse_scans(&read(&scans_path)?).with_context(|| format!("parsing {}", scans_path.display()))?;
    let ego_path = require(args.ego, &cfg.paths.ego_track, "ego-motion track", "ego_track")?;
    let track = parse_ego_track(&read(&ego_path)?).with_context(|| format!("parsing {}", ego_path.display()))?;
    let (images, image_index) = load_index(&require(args.images, &cfg.paths.images, "camera index", "images")?, "camera")?;
    let out = args.out.or(cfg.paths.output.clone()).unwrap_or_else(|| PathBuf::from("channels"));

    let scan_index = TimedIndex::new("radar", scans.iter().map(|s| s.timestamp_us).collect())?;
    let pairs = pair_streams(&image_index, &scan_index, cfg.sync.max_offset_us);
    let unpaired = scans.len() - pairs.len();
    if unpaired > 0 {
        warn!("{unpaired} of {} scans have no image within {} us; skipped", scans.len(), cfg.sync.max_offset_us);
    }
    let mut scan_of = vec![None; images.len()];
    for p in &pairs {
        scan_of[p.image] = Some(p.scan);
    }
    let (w, h) = calib.wide.dims();
    scan_of
        .par_iter()
        .enumerate()
        .map(|(frame, scan)| {
            let channels = match scan {
                Some(j) => {
                    let scan = &scans[*j];
                    render_channels(scan, &nearest_ego(scan.timestamp_us, &track)?, &calib, &cfg.radar)?
                }
                None => RadarChannels::background(w, h),
            };
            write(&out.join(format!("{frame}.range.pgm")), channels.range.to_pgm())?;
            write(&out.join(format!("{frame}.rate.pgm")), channels.range_rate.to_pgm())
        })
        .collect::<Result<()>>()?;
    info!("rendered {} frames ({} with a paired scan) into {}", images.len(), pairs.len(), out.display());
    Ok(())
}
