use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{Context, Result};
use log::info;

use radlabel::config::PipelineConfig;
use radlabel::evaluation::{classify_size, match_detections, SizeCategory};
use radlabel::io::{detections_to_ndjson, parse_detections, FrameDetections};
use radlabel::labeling::{merge_detections, Source};
use radlabel::Calibration;

use crate::settings::{override_with, read, require, write};

#[derive(clap::Args)]
pub struct Args {
    /// Calibration JSON. [paths.calibration]
    #[arg(long, value_name = "FILE")]
    calibration: Option<PathBuf>,
    /// Wide-camera detections (NDJSON). [paths.wide_detections]
    #[arg(long, value_name = "FILE")]
    wide: Option<PathBuf>,
    /// Narrow-camera detections (NDJSON). [paths.narrow_detections]
    #[arg(long, value_name = "FILE")]
    narrow: Option<PathBuf>,
    /// Where to write the merged labels. [paths.output, default: labels.ndjson]
    #[arg(long, short, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Joint-region overlap threshold. [labeling.tau, default: 0.5]
    #[arg(long)]
    tau: Option<f64>,
    /// Wide-camera ground truth; when given, recall before and after merging is reported. [paths.ground_truth]
    #[arg(long, value_name = "FILE")]
    ground_truth: Option<PathBuf>,
}

fn load(path: &std::path::Path) -> Result<FrameDetections> {
    parse_detections(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn recall(frames: &FrameDetections, gt: &FrameDetections, iou: f64) -> (usize, usize) {
    let empty = Vec::new();
    gt.iter().fold((0, 0), |(found, total), (id, g)| {
        let boxes: Vec<_> = g.iter().map(|d| d.bbox).collect();
        let m = match_detections(frames.get(id).unwrap_or(&empty), &boxes, iou);
        (found + m.found.iter().filter(|f| **f).count(), total + boxes.len())
    })
}

pub fn run(mut cfg: PipelineConfig, args: Args) -> Result<()> {
    override_with(&mut cfg.labeling.tau, args.tau);
    cfg.validate()?;
    let calib_path = require(args.calibration, &cfg.paths.calibration, "calibration", "calibration")?;
    let calib = Calibration::load(&calib_path)?;
    let wide = load(&require(args.wide, &cfg.paths.wide_detections, "wide-camera detections", "wide_detections")?)?;
    let narrow =
        load(&require(args.narrow, &cfg.paths.narrow_detections, "narrow-camera detections", "narrow_detections")?)?;
    let out = args.out.or(cfg.paths.output.clone()).unwrap_or_else(|| PathBuf::from("labels.ndjson"));

    let empty = Vec::new();
    let mut merged = FrameDetections::new();
    for id in wide.keys().chain(narrow.keys()) {
        if merged.contains_key(id) {
            continue;
        }
        let a = wide.get(id).unwrap_or(&empty);
        let b = narrow.get(id).unwrap_or(&empty);
        let m = merge_detections(a, b, &calib, cfg.labeling.tau).with_context(|| format!("frame {id}"))?;
        merged.insert(*id, m);
    }
    write(&out, detections_to_ndjson(&merged)?)?;
    info!("merged {} frames into {}", merged.len(), out.display());

    let mut counts: BTreeMap<(&str, &str), usize> = BTreeMap::new();
    for d in merged.values().flatten() {
        let source = match d.source {
            Source::Wide => "wide",
            Source::Narrow => "narrow",
            Source::Transferred => "transferred",
        };
        *counts.entry((source, classify_size(&d.bbox, calib.wide.dims()).name())).or_default() += 1;
    }
    println!("labels by source and size:");
    for source in ["wide", "transferred"] {
        let row: Vec<String> = SizeCategory::ALL
            .iter()
            .map(|c| format!("{} {}", c.name(), counts.get(&(source, c.name())).copied().unwrap_or(0)))
            .collect();
        println!("  {source:<12} {}", row.join(", "));
    }

    if let Some(p) = args.ground_truth.or(cfg.paths.ground_truth.clone()) {
        let gt = load(&p)?;
        let (before, total) = recall(&wide, &gt, cfg.evaluation.iou);
        let (after, _) = recall(&merged, &gt, cfg.evaluation.iou);
        let pct = |n: usize| if total == 0 { 0.0 } else { n as f64 / total as f64 };
        println!("recall: wide-only {:.4} ({before}/{total}), merged {:.4} ({after}/{total})", pct(before), pct(after));
    }
    Ok(())
}
