use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use log::info;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use radlabel::config::PipelineConfig;
use radlabel::dataset::{split_dataset, FrameRecord, Split};
use radlabel::io::{detections_to_ndjson, ego_track_to_ndjson, scans_to_ndjson, to_ndjson, FrameDetections, IndexEntry};
use radlabel::labeling::{Detection, ObjectClass, Source};
use radlabel::radar::{render_channels, RadarScan};
use radlabel::simulator::{
    corrupt_detections, frame_rng, simulate, DetectorModel, Scene, SensorRig, STREAM_NARROW_DETECTOR,
    STREAM_WIDE_DETECTOR,
};
use radlabel::sync::{nearest_ego, pair_streams, subsample, TimedIndex};

use crate::settings::{override_with, write};

#[derive(clap::Args)]
pub struct Args {
    /// Scene file (JSON with optional `rig`, `scene`, `wide_detector`,
    /// `narrow_detector`); built-in highway scene if omitted. [paths.scene]
    #[arg(long, value_name = "FILE")]
    scene: Option<PathBuf>,
    /// Output directory. [paths.output, default: simulated]
    #[arg(long, short, value_name = "DIR")]
    out: Option<PathBuf>,
    /// RNG seed, replacing the scene's. [seed, default: 7]
    #[arg(long)]
    seed: Option<u64>,
    /// Scene duration in seconds. [scene.duration_s, default: 10]
    #[arg(long)]
    duration: Option<f64>,
    /// Largest image/scan offset in microseconds. [sync.max_offset_us, default: 10000]
    #[arg(long)]
    max_offset_us: Option<i64>,
    /// Keep every n-th synchronised pair. [sync.subsample, default: 5]
    #[arg(long)]
    subsample: Option<usize>,
}

/// Contents of a scene file.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationSpec {
    pub rig: SensorRig,
    pub scene: Scene,
    pub wide_detector: DetectorModel,
    pub narrow_detector: DetectorModel,
}

fn detections(gts: &[radlabel::geometry::BBox], dims: (u32, u32), model: &DetectorModel, source: Source, seed: u64, k: usize, stream: u64) -> Result<Vec<Detection>> {
    let mut rng = frame_rng(seed, k as u64, stream);
    Ok(corrupt_detections(gts, dims, model, source, &mut rng)?)
}

fn ground_truth(boxes: Vec<radlabel::geometry::BBox>, source: Source) -> Vec<Detection> {
    boxes.into_iter().map(|b| Detection::certain(b, ObjectClass::Vehicle, source)).collect()
}

pub fn run(mut cfg: PipelineConfig, args: Args) -> Result<()> {
    override_with(&mut cfg.seed, args.seed);
    override_with(&mut cfg.sync.max_offset_us, args.max_offset_us);
    override_with(&mut cfg.sync.subsample, args.subsample);
    cfg.validate()?;
    let out = args.out.or(cfg.paths.output.clone()).unwrap_or_else(|| PathBuf::from("simulated"));

    let mut spec: SimulationSpec = match args.scene.or(cfg.paths.scene.clone()) {
        Some(p) => serde_json::from_str(&crate::settings::read(&p)?).with_context(|| format!("parsing scene {}", p.display()))?,
        None => SimulationSpec::default(),
    };
    spec.scene.seed = cfg.seed;
    override_with(&mut spec.scene.duration_s, args.duration);
    spec.wide_detector.validate().context("wide_detector")?;
    spec.narrow_detector.validate().context("narrow_detector")?;

    let run = simulate(&spec.scene, &spec.rig)?;
    if run.frames.is_empty() {
        bail!("scene produces no camera frames (duration {} s)", spec.scene.duration_s);
    }
    let calib = spec.rig.calibration();
    let seed = cfg.seed;
    info!("simulated {} camera frames and {} radar scans", run.frames.len(), run.scans.len());

    let per_frame: Vec<(Vec<Detection>, Vec<Detection>)> = run
        .frames
        .par_iter()
        .enumerate()
        .map(|(k, f)| {
            let a = detections(&f.wide_boxes(), calib.wide.dims(), &spec.wide_detector, Source::Wide, seed, k, STREAM_WIDE_DETECTOR)?;
            let b = detections(&f.narrow_boxes(), calib.narrow.dims(), &spec.narrow_detector, Source::Narrow, seed, k, STREAM_NARROW_DETECTOR)?;
            Ok((a, b))
        })
        .collect::<Result<_>>()?;
    let mut wide_dets = FrameDetections::new();
    let mut narrow_dets = FrameDetections::new();
    let mut wide_gt = FrameDetections::new();
    let mut narrow_gt = FrameDetections::new();
    for (k, ((a, b), f)) in per_frame.into_iter().zip(&run.frames).enumerate() {
        let id = k as u64;
        wide_dets.insert(id, a);
        narrow_dets.insert(id, b);
        wide_gt.insert(id, ground_truth(f.wide_boxes(), Source::Wide));
        narrow_gt.insert(id, ground_truth(f.narrow_boxes(), Source::Narrow));
    }

    let images = TimedIndex::new("camera", run.frames.iter().map(|f| f.timestamp_us).collect())?;
    let scans_index = TimedIndex::new("radar", run.scans.iter().map(|s| s.scan.timestamp_us).collect())?;
    let pairs = pair_streams(&images, &scans_index, cfg.sync.max_offset_us);
    let kept = subsample(&pairs, cfg.sync.subsample)?;
    if kept.is_empty() {
        bail!("no camera frame has a radar scan within {} us", cfg.sync.max_offset_us);
    }
    info!("{} synchronised pairs, {} kept after sub-sampling by {}", pairs.len(), kept.len(), cfg.sync.subsample);

    let scans: Vec<RadarScan> = run.scans.iter().map(|s| s.scan.clone()).collect();
    kept.par_iter()
        .map(|p| {
            let ego = nearest_ego(p.scan_us, &run.ego_track)?;
            let ch = render_channels(&scans[p.scan], &ego, &calib, &cfg.radar)?;
            write(&out.join(format!("channels/{}.range.pgm", p.image)), ch.range.to_pgm())?;
            write(&out.join(format!("channels/{}.rate.pgm", p.image)), ch.range_rate.to_pgm())
        })
        .collect::<Result<()>>()?;

    let records: Vec<FrameRecord> = kept
        .iter()
        .map(|p| FrameRecord {
            frame_id: p.image as u64,
            timestamp_us: p.image_us,
            scan_timestamp_us: Some(p.scan_us),
            ground_truth: "gt/wide.ndjson".into(),
            radar_range: Some(format!("channels/{}.range.pgm", p.image)),
            radar_rate: Some(format!("channels/{}.rate.pgm", p.image)),
            split: Split::Train,
        })
        .collect();
    let manifest = split_dataset(records, cfg.split, calib.wide.dims())?;

    let camera_index: Vec<IndexEntry> = run
        .frames
        .iter()
        .enumerate()
        .map(|(k, f)| IndexEntry { timestamp_us: f.timestamp_us, path: format!("camera/{k}") })
        .collect();
    let radar_index: Vec<IndexEntry> = scans
        .iter()
        .map(|s| IndexEntry { timestamp_us: s.timestamp_us, path: "radar/scans.ndjson".into() })
        .collect();
    let resolved = SimulationSpec { scene: run.scene.clone(), ..spec };

    let files: [(&str, String); 11] = [
        ("calibration.json", calib.to_json()? + "\n"),
        ("scene.json", serde_json::to_string_pretty(&resolved)? + "\n"),
        ("camera/index.ndjson", to_ndjson(&camera_index)?),
        ("radar/index.ndjson", to_ndjson(&radar_index)?),
        ("radar/scans.ndjson", scans_to_ndjson(&scans)?),
        ("ego.ndjson", ego_track_to_ndjson(&run.ego_track)?),
        ("gt/wide.ndjson", detections_to_ndjson(&wide_gt)?),
        ("gt/narrow.ndjson", detections_to_ndjson(&narrow_gt)?),
        ("detections/wide.ndjson", detections_to_ndjson(&wide_dets)?),
        ("detections/narrow.ndjson", detections_to_ndjson(&narrow_dets)?),
        ("manifest.json", manifest.to_json()?),
    ];
    for (name, contents) in &files {
        write(&out.join(name), contents)?;
    }
    print_summary(&out, &manifest);
    Ok(())
}

fn print_summary(out: &Path, m: &radlabel::dataset::DatasetManifest) {
    println!(
        "wrote {}: {} frames (train {}, val {}, test {})",
        out.display(),
        m.frames.len(),
        m.count(Split::Train),
        m.count(Split::Val),
        m.count(Split::Test)
    );
}
