use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use serde::Serialize;

use radlabel::config::PipelineConfig;
use radlabel::dataset::{DatasetManifest, Split};
use radlabel::radar::{channel_stats, GrayImage, RadarChannels};

use crate::settings::{read, write};

#[derive(clap::Args)]
pub struct Args {
    /// Dataset manifest; channel paths are resolved relative to it.
    #[arg(long, value_name = "FILE")]
    manifest: PathBuf,
    /// Split to measure. [default: train]
    #[arg(long, value_enum, default_value = "train")]
    split: SplitArg,
    /// Also write the statistics as JSON. [paths.output]
    #[arg(long, short, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum SplitArg {
    Train,
    Val,
    Test,
}

impl From<SplitArg> for Split {
    fn from(s: SplitArg) -> Self {
        match s {
            SplitArg::Train => Split::Train,
            SplitArg::Val => Split::Val,
            SplitArg::Test => Split::Test,
        }
    }
}

#[derive(Serialize)]
struct Output {
    frames: usize,
    stats: radlabel::radar::ChannelStats,
}

fn load_pgm(path: &std::path::Path) -> Result<GrayImage> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    GrayImage::from_pgm(&bytes).with_context(|| format!("decoding {}", path.display()))
}

pub fn run(cfg: PipelineConfig, args: Args) -> Result<()> {
    let manifest = DatasetManifest::from_json(&read(&args.manifest)?)
        .with_context(|| format!("parsing {}", args.manifest.display()))?;
    let root = args.manifest.parent().map(PathBuf::from).unwrap_or_default();
    let split = Split::from(args.split);
    let mut channels = Vec::new();
    for f in manifest.frames.iter().filter(|f| f.split == split) {
        let (Some(r), Some(rr)) = (&f.radar_range, &f.radar_rate) else {
            bail!("frame {} has no radar channel paths", f.frame_id);
        };
        channels.push(RadarChannels { range: load_pgm(&root.join(r))?, range_rate: load_pgm(&root.join(rr))? });
    }
    let stats = channel_stats(&channels)?;
    println!("{} frames", channels.len());
    println!("range       mean {:.4}  std {:.4}", stats.range.mean, stats.range.std);
    println!("range rate  mean {:.4}  std {:.4}", stats.range_rate.mean, stats.range_rate.std);
    if let Some(out) = args.out.or(cfg.paths.output) {
        write(&out, serde_json::to_string_pretty(&Output { frames: channels.len(), stats })? + "\n")?;
    }
    Ok(())
}
