use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::BBox;
use crate::labeling::{Detection, ObjectClass, Source};

/// Stand-in for a trained detector: misses objects depending on their pixel
/// area, jitters box edges and adds false positives.
///
/// Size classes use absolute pixel area so that a camera with a longer focal
/// length, which puts more pixels on the same object, detects it more often.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DetectorModel {
    /// Miss probability for boxes below `small_area_px`.
    pub miss_small: f64,
    /// Miss probability for boxes between the two thresholds (inclusive).
    pub miss_medium: f64,
    /// Miss probability for boxes above `large_area_px`.
    pub miss_large: f64,
    pub small_area_px: f64,
    pub large_area_px: f64,
    /// Edge noise standard deviation as a fraction of the box width / height.
    pub jitter_sigma: f64,
    /// Probability, per slot, that a false positive appears.
    pub fp_rate: f64,
    pub fp_slots: usize,
    /// True-positive confidences are uniform in this range.
    pub tp_confidence: [f64; 2],
    /// False-positive confidences are uniform in this range.
    pub fp_confidence: [f64; 2],
}

impl Default for DetectorModel {
    fn default() -> Self {
        Self {
            miss_small: 0.8,
            miss_medium: 0.3,
            miss_large: 0.05,
            small_area_px: 409.6,
            large_area_px: 4096.0,
            jitter_sigma: 0.05,
            fp_rate: 0.3,
            fp_slots: 2,
            tp_confidence: [0.3, 1.0],
            fp_confidence: [0.05, 0.6],
        }
    }
}

impl DetectorModel {
    /// Emits every ground-truth box unchanged with confidence 1.
    pub fn perfect() -> Self {
        Self {
            miss_small: 0.0,
            miss_medium: 0.0,
            miss_large: 0.0,
            jitter_sigma: 0.0,
            fp_rate: 0.0,
            fp_slots: 0,
            tp_confidence: [1.0, 1.0],
            fp_confidence: [1.0, 1.0],
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [
            ("miss_small", self.miss_small),
            ("miss_medium", self.miss_medium),
            ("miss_large", self.miss_large),
            ("fp_rate", self.fp_rate),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("{name} = {p} must lie in [0, 1]")));
            }
        }
        if !(self.jitter_sigma >= 0.0 && self.jitter_sigma.is_finite()) {
            return Err(Error::Config("jitter_sigma must be non-negative".into()));
        }
        if !(self.small_area_px <= self.large_area_px) {
            return Err(Error::Config("small_area_px must not exceed large_area_px".into()));
        }
        for (name, [lo, hi]) in [("tp_confidence", self.tp_confidence), ("fp_confidence", self.fp_confidence)] {
            if !(0.0 <= lo && lo <= hi && hi <= 1.0) {
                return Err(Error::Config(format!("{name} [{lo}, {hi}] must be an ordered range in [0, 1]")));
            }
        }
        Ok(())
    }

    pub fn miss_rate(&self, bbox: &BBox) -> f64 {
        let a = bbox.area();
        if a < self.small_area_px {
            self.miss_small
        } else if a > self.large_area_px {
            self.miss_large
        } else {
            self.miss_medium
        }
    }
}

fn uniform<R: Rng>(rng: &mut R, [lo, hi]: [f64; 2]) -> f64 {
    if lo < hi {
        rng.random_range(lo..=hi)
    } else {
        lo
    }
}

/// Produces noisy detections of `ground_truth` inside an image of size `dims`.
///
/// For each box, in order: a miss draw, four edge perturbations, a confidence
/// draw. Then `fp_slots` false-positive draws. Boxes are clipped to the image
/// and any that collapse are discarded. Output is in ground-truth order
/// followed by false positives.
pub fn corrupt_detections<R: Rng>(
    ground_truth: &[BBox],
    dims: (u32, u32),
    model: &DetectorModel,
    source: Source,
    rng: &mut R,
) -> Result<Vec<Detection>> {
    model.validate()?;
    let bounds = BBox::from_size(f64::from(dims.0), f64::from(dims.1));
    let std = Normal::new(0.0, 1.0).expect("unit normal");
    let mut out = Vec::with_capacity(ground_truth.len() + model.fp_slots);
    let emit = |b: BBox, conf: f64, out: &mut Vec<Detection>| {
        let clipped = b.clip(&bounds);
        if clipped.area() > 0.0 {
            let mut d = Detection::certain(clipped, ObjectClass::Vehicle, source);
            d.objectness = conf;
            out.push(d);
        }
    };

    for gt in ground_truth {
        if rng.random_bool(model.miss_rate(gt)) {
            continue;
        }
        let (sx, sy) = (model.jitter_sigma * gt.width(), model.jitter_sigma * gt.height());
        let mut e = [0.0; 4];
        for (i, v) in e.iter_mut().enumerate() {
            *v = std.sample(rng) * if i % 2 == 0 { sx } else { sy };
        }
        let (x0, y0) = (gt.x_min() + e[0], gt.y_min() + e[1]);
        let (x1, y1) = (gt.x_max() + e[2], gt.y_max() + e[3]);
        let conf = uniform(rng, model.tp_confidence);
        if let Ok(b) = BBox::new(x0.min(x1), y0.min(y1), x0.max(x1), y0.max(y1)) {
            emit(b, conf, &mut out);
        }
    }

    for _ in 0..model.fp_slots {
        if !rng.random_bool(model.fp_rate) {
            continue;
        }
        let w = rng.random_range(4.0..(bounds.width() / 4.0).max(4.0 + 1e-9));
        let h = w * rng.random_range(0.5..1.0);
        let cx = rng.random_range(0.0..bounds.width());
        let cy = rng.random_range(0.0..bounds.height());
        let conf = uniform(rng, model.fp_confidence);
        emit(BBox::from_center(cx, cy, w, h), conf, &mut out);
    }
    Ok(out)
}
