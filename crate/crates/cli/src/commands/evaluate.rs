use std::path::PathBuf;

use anyhow::{bail, Context, Result};

use radlabel::config::PipelineConfig;
use radlabel::detector::nms;
use radlabel::evaluation::{size_stratified_report, EvalFrame};
use radlabel::io::parse_detections;
use radlabel::Calibration;

use crate::settings::{override_with, read, require, write};

#[derive(clap::Args)]
pub struct Args {
    /// Ground truth (NDJSON detections; frames without objects as `{"frame_id": n}`). [paths.ground_truth]
    #[arg(long, value_name = "FILE")]
    ground_truth: Option<PathBuf>,
    /// Detections to score. [paths.detections]
    #[arg(long, value_name = "FILE")]
    detections: Option<PathBuf>,
    /// Report JSON. [paths.output, default: report.json]
    #[arg(long, short, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Also write the precision/recall curves as CSV.
    #[arg(long, value_name = "FILE")]
    csv: Option<PathBuf>,
    /// True-positive IoU threshold. [evaluation.iou, default: 0.5]
    #[arg(long)]
    iou: Option<f64>,
    /// Image size as WIDTHxHEIGHT for size categories; taken from the
    /// calibration's wide camera if omitted, else 640x256.
    #[arg(long, value_parser = parse_dims)]
    dims: Option<(u32, u32)>,
    /// Calibration JSON, used only for the image size. [paths.calibration]
    #[arg(long, value_name = "FILE")]
    calibration: Option<PathBuf>,
    /// Apply non-maximum suppression before scoring. [nms.iou = 0.45, nms.max_out = 200]
    #[arg(long)]
    nms: bool,
}

fn parse_dims(s: &str) -> Result<(u32, u32), String> {
    let (w, h) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected WIDTHxHEIGHT, got {s}"))?;
    let parse = |v: &str| v.trim().parse::<u32>().map_err(|e| format!("{v}: {e}"));
    Ok((parse(w)?, parse(h)?))
}

pub fn run(mut cfg: PipelineConfig, args: Args) -> Result<()> {
    override_with(&mut cfg.evaluation.iou, args.iou);
    cfg.validate()?;
    let gt_path = require(args.ground_truth, &cfg.paths.ground_truth, "ground truth", "ground_truth")?;
    let det_path = require(args.detections, &cfg.paths.detections, "detections", "detections")?;
    let gt = parse_detections(&read(&gt_path)?).with_context(|| format!("parsing {}", gt_path.display()))?;
    let dets = parse_detections(&read(&det_path)?).with_context(|| format!("parsing {}", det_path.display()))?;
    let out = args.out.or(cfg.paths.output.clone()).unwrap_or_else(|| PathBuf::from("report.json"));
    let dims = match (args.dims, args.calibration.or(cfg.paths.calibration.clone())) {
        (Some(d), _) => d,
        (None, Some(p)) => Calibration::load(&p)?.wide.dims(),
        (None, None) => (640, 256),
    };

    let unknown: Vec<String> = dets.keys().filter(|id| !gt.contains_key(id)).map(u64::to_string).collect();
    if !unknown.is_empty() {
        bail!("detections reference frames absent from the ground truth: {}", unknown.join(", "));
    }
    let frames: Vec<EvalFrame> = gt
        .iter()
        .map(|(id, g)| {
            let mut d = dets.get(id).cloned().unwrap_or_default();
            if args.nms {
                d = nms(&d, cfg.nms.iou, cfg.nms.max_out);
            }
            EvalFrame { detections: d, ground_truth: g.iter().map(|x| x.bbox).collect() }
        })
        .collect();
    let report = size_stratified_report(&frames, dims, cfg.evaluation.iou);
    write(&out, report.to_json() + "\n")?;
    if let Some(csv) = args.csv {
        write(&csv, report.to_csv())?;
    }
    for (name, r) in report.entries() {
        let ap = r.ap.map_or("n/a".to_string(), |v| format!("{v:.4}"));
        println!(
            "{name:<7} AP {ap:>6}  TP {:>6}  FP {:>6}  FN {:>6}",
            r.curve.true_positives, r.curve.false_positives, r.curve.false_negatives
        );
    }
    Ok(())
}
