//! Dataset assembly: contiguous train/val/test splits and the crop +
//! downscale bookkeeping that maps raw-image coordinates to network input.
//!
//! # Manifest schema
//!
//! ```json
//! {
//!   "image_width": 640,
//!   "image_height": 256,
//!   "fractions": { "train": 0.7, "val": 0.1, "test": 0.2 },
//!   "frames": [
//!     { "frame_id": 0, "timestamp_us": 0, "scan_timestamp_us": 312,
//!       "ground_truth": "gt/wide.ndjson",
//!       "radar_range": "radar/0.range.pgm", "radar_rate": "radar/0.rate.pgm",
//!       "split": "train" }
//!   ]
//! }
//! ```
//!
//! Keys are always written in this order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BBox, CameraIntrinsics, ImagePoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Val,
    Test,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitFractions {
    pub train: f64,
    pub val: f64,
    pub test: f64,
}

impl Default for SplitFractions {
    fn default() -> Self {
        Self { train: 0.7, val: 0.1, test: 0.2 }
    }
}

impl SplitFractions {
    pub fn new(train: f64, val: f64, test: f64) -> Result<Self> {
        let f = Self { train, val, test };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        let parts = [self.train, self.val, self.test];
        if parts.iter().any(|p| !(*p >= 0.0)) {
            return Err(Error::Config(format!("split fractions {parts:?} must be non-negative")));
        }
        let sum: f64 = parts.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!("split fractions sum to {sum}, expected 1")));
        }
        Ok(())
    }

    /// Number of frames in each split for `n` frames.
    ///
    /// Boundaries sit at `floor(n · cumulative fraction)`, with a 1e-9 slack
    /// so that products like `10 · 0.7` are not pushed down by rounding.
    pub fn counts(&self, n: usize) -> [usize; 3] {
        let cut = |f: f64| ((n as f64 * f + 1e-9).floor() as usize).min(n);
        let b1 = cut(self.train);
        let b2 = cut(self.train + self.val).max(b1);
        [b1, b2 - b1, n - b2]
    }
}

/// One entry of a [`DatasetManifest`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameRecord {
    pub frame_id: u64,
    pub timestamp_us: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan_timestamp_us: Option<i64>,
    pub ground_truth: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radar_range: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radar_rate: Option<String>,
    pub split: Split,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub image_width: u32,
    pub image_height: u32,
    pub fractions: SplitFractions,
    pub frames: Vec<FrameRecord>,
}

impl DatasetManifest {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: Self = serde_json::from_str(text)?;
        m.fractions.validate()?;
        Ok(m)
    }

    pub fn count(&self, split: Split) -> usize {
        self.frames.iter().filter(|f| f.split == split).count()
    }
}

/// Assigns split tags in capture order: the first frames train, then
/// validation, then test. Frames are never shuffled, so consecutive,
/// near-identical images stay on the same side of each boundary.
pub fn split_dataset(
    mut frames: Vec<FrameRecord>,
    fractions: SplitFractions,
    image_dims: (u32, u32),
) -> Result<DatasetManifest> {
    fractions.validate()?;
    if frames.is_empty() {
        return Err(Error::Empty("dataset frames"));
    }
    let [train, val, _] = fractions.counts(frames.len());
    for (i, f) in frames.iter_mut().enumerate() {
        f.split = if i < train {
            Split::Train
        } else if i < train + val {
            Split::Val
        } else {
            Split::Test
        };
    }
    Ok(DatasetManifest { image_width: image_dims.0, image_height: image_dims.1, fractions, frames })
}

/// Crop followed by uniform scaling: `x' = s·(x − x₀)`, `y' = s·(y − y₀)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImageTransform {
    pub crop: BBox,
    pub scale: f64,
}

/// Builds the raw → network-input transform.
pub fn crop_downscale_meta(raw_dims: (u32, u32), crop: BBox, scale: f64) -> Result<ImageTransform> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::Domain(format!("scale must be positive, got {scale}")));
    }
    let raw = BBox::from_size(f64::from(raw_dims.0), f64::from(raw_dims.1));
    if !raw.contains(&crop) || crop.area() <= 0.0 {
        return Err(Error::Invalid(format!(
            "crop {:?} must be a non-empty region inside the {}x{} raw image",
            crop.as_array(),
            raw_dims.0,
            raw_dims.1
        )));
    }
    Ok(ImageTransform { crop, scale })
}

impl ImageTransform {
    pub fn identity(dims: (u32, u32)) -> Self {
        Self { crop: BBox::from_size(f64::from(dims.0), f64::from(dims.1)), scale: 1.0 }
    }

    /// Output image size, rounded to whole pixels.
    pub fn output_dims(&self) -> (u32, u32) {
        ((self.crop.width() * self.scale).round() as u32, (self.crop.height() * self.scale).round() as u32)
    }

    pub fn apply_point(&self, p: ImagePoint) -> ImagePoint {
        ImagePoint::new(self.scale * (p.u - self.crop.x_min()), self.scale * (p.v - self.crop.y_min()))
    }

    pub fn invert_point(&self, p: ImagePoint) -> ImagePoint {
        ImagePoint::new(p.u / self.scale + self.crop.x_min(), p.v / self.scale + self.crop.y_min())
    }

    /// Maps a box without clipping.
    pub fn apply_box(&self, b: &BBox) -> BBox {
        let s = self.scale;
        b.map_affine(s, s, -s * self.crop.x_min(), -s * self.crop.y_min())
    }

    pub fn invert_box(&self, b: &BBox) -> BBox {
        let s = 1.0 / self.scale;
        b.map_affine(s, s, self.crop.x_min(), self.crop.y_min())
    }

    /// Maps a box and clips it to the output image; `None` if nothing is left.
    pub fn apply_box_clipped(&self, b: &BBox) -> Option<BBox> {
        let (w, h) = self.output_dims();
        let out = self.apply_box(b).clip(&BBox::from_size(f64::from(w), f64::from(h)));
        (out.area() > 0.0).then_some(out)
    }

    /// Intrinsics of the transformed image, so that projecting with them
    /// equals projecting with the raw intrinsics and then applying `self`.
    pub fn apply_intrinsics(&self, k: &CameraIntrinsics) -> Result<CameraIntrinsics> {
        let c = self.apply_point(ImagePoint::new(k.cx, k.cy));
        let (w, h) = self.output_dims();
        CameraIntrinsics::new(k.fx * self.scale, k.fy * self.scale, c.u, c.v, w, h)
    }
}
