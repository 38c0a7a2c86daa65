use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::BBox;

/// A prior box in normalized image coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DefaultBox {
    pub cx: f64,
    pub cy: f64,
    pub w: f64,
    pub h: f64,
    /// Feature level the box belongs to.
    pub scale_index: usize,
    pub aspect_index: usize,
    /// Row-major position within the cell's sub-grid.
    pub subdivision_index: usize,
}

impl DefaultBox {
    /// Corner form, normalized coordinates.
    pub fn to_bbox(&self) -> BBox {
        BBox::from_center(self.cx, self.cy, self.w, self.h)
    }
}

/// One feature map with its box scale and aspect ratios.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureLevel {
    pub width: u32,
    pub height: u32,
    /// Box size as a fraction of the image.
    pub scale: f64,
    /// Width / height ratios.
    pub aspect_ratios: Vec<f64>,
}

/// Default-box layout, readable from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnchorConfig {
    pub levels: Vec<FeatureLevel>,
    /// Side of the per-cell sub-grid; 1 gives one box centre per cell.
    pub subdivisions: u32,
}

impl AnchorConfig {
    /// Six levels for a 640×256 input with standard single-shot scales and
    /// aspect ratios, and a 2×2 sub-grid per cell.
    pub fn default_640x256() -> Self {
        let narrow = vec![1.0, 2.0, 0.5];
        let wide = vec![1.0, 2.0, 0.5, 3.0, 1.0 / 3.0];
        let sizes = [(80, 32), (40, 16), (20, 8), (10, 4), (5, 2), (3, 1)];
        let scales = [0.1, 0.2, 0.375, 0.55, 0.725, 0.9];
        let levels = sizes
            .iter()
            .zip(scales)
            .enumerate()
            .map(|(i, (&(width, height), scale))| FeatureLevel {
                width,
                height,
                scale,
                aspect_ratios: if (1..4).contains(&i) { wide.clone() } else { narrow.clone() },
            })
            .collect();
        Self { levels, subdivisions: 2 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.levels.is_empty() {
            return Err(Error::Config("anchor config has no feature levels".into()));
        }
        if self.subdivisions == 0 {
            return Err(Error::Config("subdivisions must be at least 1".into()));
        }
        for (i, l) in self.levels.iter().enumerate() {
            if l.width == 0 || l.height == 0 {
                return Err(Error::Config(format!("level {i} has an empty feature map")));
            }
            if l.aspect_ratios.is_empty() {
                return Err(Error::Config(format!("level {i} has no aspect ratios")));
            }
            if !(l.scale > 0.0 && l.scale.is_finite()) {
                return Err(Error::Config(format!("level {i} scale must be positive")));
            }
            if l.aspect_ratios.iter().any(|a| !(*a > 0.0 && a.is_finite())) {
                return Err(Error::Config(format!("level {i} aspect ratios must be positive")));
            }
        }
        Ok(())
    }

    /// `Σ width · height · s² · |aspects|` over levels.
    pub fn box_count(&self) -> usize {
        let s = self.subdivisions as usize;
        self.levels
            .iter()
            .map(|l| l.width as usize * l.height as usize * s * s * l.aspect_ratios.len())
            .sum()
    }
}

/// Lays default boxes out over every feature map.
///
/// Each cell is split into an `s × s` sub-grid and a copy of the cell's
/// boxes is centred on every sub-cell centre. Order: level, cell row, cell
/// column, sub-row, sub-column, aspect ratio.
pub fn generate_default_boxes(config: &AnchorConfig) -> Result<Vec<DefaultBox>> {
    config.validate()?;
    let s = config.subdivisions;
    let mut out = Vec::with_capacity(config.box_count());
    for (scale_index, level) in config.levels.iter().enumerate() {
        let (fw, fh) = (f64::from(level.width), f64::from(level.height));
        for j in 0..level.height {
            for i in 0..level.width {
                for sj in 0..s {
                    for si in 0..s {
                        let cx = (f64::from(i) + (f64::from(si) + 0.5) / f64::from(s)) / fw;
                        let cy = (f64::from(j) + (f64::from(sj) + 0.5) / f64::from(s)) / fh;
                        for (aspect_index, ar) in level.aspect_ratios.iter().enumerate() {
                            let root = ar.sqrt();
                            out.push(DefaultBox {
                                cx,
                                cy,
                                w: level.scale * root,
                                h: level.scale / root,
                                scale_index,
                                aspect_index,
                                subdivision_index: (sj * s + si) as usize,
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}
