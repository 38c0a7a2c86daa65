use std::path::PathBuf;

use anyhow::{Context, Result};

use radlabel::config::PipelineConfig;
use radlabel::detector::{generate_default_boxes, AnchorConfig};
use radlabel::io::to_ndjson;

use crate::settings::{read, write};

#[derive(clap::Args)]
pub struct Args {
    /// Anchor layout JSON (`levels`: width, height, scale, aspect_ratios;
    /// `subdivisions`). Six levels for 640x256 input if omitted. [paths.anchors]
    #[arg(long, value_name = "FILE")]
    anchors: Option<PathBuf>,
    /// Per-cell sub-grid side, overriding the layout's. [default: 2]
    #[arg(long)]
    subdivisions: Option<u32>,
    /// Write every default box as NDJSON.
    #[arg(long, short, value_name = "FILE")]
    out: Option<PathBuf>,
}

pub fn run(cfg: PipelineConfig, args: Args) -> Result<()> {
    let mut layout = match args.anchors.or(cfg.paths.anchors.clone()) {
        Some(p) => serde_json::from_str(&read(&p)?).with_context(|| format!("parsing {}", p.display()))?,
        None => AnchorConfig::default_640x256(),
    };
    if let Some(s) = args.subdivisions {
        layout.subdivisions = s;
    }
    let boxes = generate_default_boxes(&layout)?;
    let s = layout.subdivisions;
    for (i, l) in layout.levels.iter().enumerate() {
        let n = (l.width * l.height * s * s) as usize * l.aspect_ratios.len();
        println!("level {i}: {}x{} cells, scale {}, {} aspects -> {n} boxes", l.width, l.height, l.scale, l.aspect_ratios.len());
    }
    println!("total: {} default boxes (sub-grid {s}x{s})", boxes.len());
    if let Some(out) = args.out {
        write(&out, to_ndjson(&boxes)?)?;
    }
    Ok(())
}
