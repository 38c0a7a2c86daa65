mod commands;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

/// Every configuration key, its default, and where the default comes from.
const CONFIG_KEYS: &str = "\
CONFIGURATION FILE (TOML, every key optional; command-line flags win):
  seed = 7                         RNG seed for simulation and augmentation
  [paths]
  calibration, scene, wide_detections, narrow_detections, detections,
  ground_truth, scans, ego_track, images, anchors, output
                                   input and output locations (no defaults)
  [labeling]  tau = 0.5            overlap above which a wide detection inside
                                   the joint region is dropped
  [sync]      max_offset_us = 10000
                                   largest image/scan offset, 10 ms
              subsample = 5        keep every 5th pair
  [nms]       iou = 0.45           suppression threshold
              max_out = 200        boxes kept per image
  [evaluation] iou = 0.5           true-positive IoU
  [radar]     radius_px = 2        disc radius per target
  [radar.encoding]
              max_range_m = 100.0  range mapped to pixel 255
              rate_scale = 5.0     pixel values per m/s
              rate_null = 127      pixel value of zero range rate
  [split]     train = 0.7, val = 0.1, test = 0.2
                                   contiguous split fractions

ENVIRONMENT:
  RADLABEL_LOG   log filter, e.g. `debug` or `radlabel=trace` (default: info)";

#[derive(Parser)]
#[command(name = "radlabel", version, about, after_long_help = CONFIG_KEYS)]
struct Cli {
    /// TOML configuration file; see the key list below.
    #[arg(long, short, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset: ground truth, detections, radar, ego track and manifest.
    Simulate(commands::simulate::Args),
    /// Merge wide- and narrow-camera detections into labels for the wide camera.
    Label(commands::label::Args),
    /// Render radar range and range-rate channel images for every camera frame.
    Radar(commands::radar::Args),
    /// Pair camera frames with radar scans and sub-sample the pairs.
    Sync(commands::sync::Args),
    /// Size-stratified average precision of detections against ground truth.
    Evaluate(commands::evaluate::Args),
    /// Lay out default boxes and report their count.
    Anchors(commands::anchors::Args),
    /// Mean and standard deviation of radar channel pixels over a split.
    Stats(commands::stats::Args),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("RADLABEL_LOG", "info"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    let result = settings::load(cli.config.as_deref()).and_then(|cfg| match cli.command {
        Command::Simulate(a) => commands::simulate::run(cfg, a),
        Command::Label(a) => commands::label::run(cfg, a),
        Command::Radar(a) => commands::radar::run(cfg, a),
        Command::Sync(a) => commands::sync::run(cfg, a),
        Command::Evaluate(a) => commands::evaluate::run(cfg, a),
        Command::Anchors(a) => commands::anchors::run(cfg, a),
        Command::Stats(a) => commands::stats::run(cfg, a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
