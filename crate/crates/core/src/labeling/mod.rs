//! Detections and the multi-camera label merge.

mod augment;
mod joint;
mod merge;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::BBox;

pub use augment::{crop_resize_boxes, flip_boxes, Augmentation, MIN_CROP_FRACTION};
pub use joint::{compute_joint_region, overlap_min_ratio, overlap_with_joint, JointRegion};
pub use merge::{merge_detections, DEFAULT_TAU};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectClass {
    Vehicle,
    Pedestrian,
}

impl ObjectClass {
    pub const ALL: [ObjectClass; 2] = [ObjectClass::Vehicle, ObjectClass::Pedestrian];

    pub fn index(self) -> usize {
        match self {
            ObjectClass::Vehicle => 0,
            ObjectClass::Pedestrian => 1,
        }
    }
}

/// Which camera a detection came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Wide,
    Narrow,
    /// Detected in the narrow camera and redrawn in the wide camera.
    Transferred,
}

/// A detector output: box, objectness `P(O)` and per-class `P(C|O)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub bbox: BBox,
    pub objectness: f64,
    /// Indexed by [`ObjectClass::index`].
    pub class_probs: Vec<f64>,
    pub class: ObjectClass,
    pub source: Source,
}

impl Detection {
    pub fn new(
        bbox: BBox,
        objectness: f64,
        class_probs: Vec<f64>,
        class: ObjectClass,
        source: Source,
    ) -> Result<Self> {
        let det = Self { bbox, objectness, class_probs, class, source };
        det.validate()?;
        Ok(det)
    }

    /// A certain detection of `class`: objectness 1 and `P(class|O) = 1`.
    pub fn certain(bbox: BBox, class: ObjectClass, source: Source) -> Self {
        let mut class_probs = vec![0.0; ObjectClass::ALL.len()];
        class_probs[class.index()] = 1.0;
        Self { bbox, objectness: 1.0, class_probs, class, source }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |p: f64| (0.0..=1.0).contains(&p);
        if !unit(self.objectness) {
            return Err(Error::Invalid(format!("objectness {} outside [0, 1]", self.objectness)));
        }
        if let Some(p) = self.class_probs.iter().find(|p| !unit(**p)) {
            return Err(Error::Invalid(format!("class probability {p} outside [0, 1]")));
        }
        let total: f64 = self.class_probs.iter().sum();
        if total > 1.0 + 1e-6 {
            return Err(Error::Invalid(format!("class probabilities sum to {total} > 1")));
        }
        Ok(())
    }

    /// Class-specific confidence `P(O) · P(class|O)`; falls back to objectness
    /// when no class distribution is attached.
    pub fn confidence(&self) -> f64 {
        match self.class_probs.get(self.class.index()) {
            Some(p) => self.objectness * p,
            None => self.objectness,
        }
    }

    pub fn with_bbox(&self, bbox: BBox) -> Self {
        Self { bbox, ..self.clone() }
    }
}

/// Descending confidence, ties by ascending `x_min`.
pub fn confidence_order(a: &Detection, b: &Detection) -> std::cmp::Ordering {
    b.confidence()
        .total_cmp(&a.confidence())
        .then(a.bbox.x_min().total_cmp(&b.bbox.x_min()))
}
