//! Detection evaluation: IoU matching, precision/recall curves, interpolated
//! average precision and image-area size categories.

mod ap;
mod matching;
mod report;

use serde::{Deserialize, Serialize};

use crate::geometry::BBox;

pub use ap::{average_precision, PrCurve, PrPoint};
pub use matching::{match_detections, match_with_ignore, FrameMatch, Outcome, EVAL_IOU};
pub use report::{evaluate, size_stratified_report, CategoryResult, EvalFrame, SizeReport};

/// Area fraction below which an object is small.
pub const SMALL_FRACTION: f64 = 0.0025;
/// Area fraction above which an object is large.
pub const LARGE_FRACTION: f64 = 0.025;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SizeCategory {
    Small,
    Medium,
    Large,
}

impl SizeCategory {
    pub const ALL: [SizeCategory; 3] = [SizeCategory::Small, SizeCategory::Medium, SizeCategory::Large];

    pub fn name(self) -> &'static str {
        match self {
            SizeCategory::Small => "small",
            SizeCategory::Medium => "medium",
            SizeCategory::Large => "large",
        }
    }
}

/// Intersection over union; 0 when the union is empty.
pub fn iou(a: &BBox, b: &BBox) -> f64 {
    a.iou(b)
}

/// Size bucket by fraction of the image area. Both boundaries belong to
/// medium.
pub fn classify_size(bbox: &BBox, image_dims: (u32, u32)) -> SizeCategory {
    let image_area = f64::from(image_dims.0) * f64::from(image_dims.1);
    let area = bbox.area();
    if area < SMALL_FRACTION * image_area {
        SizeCategory::Small
    } else if area > LARGE_FRACTION * image_area {
        SizeCategory::Large
    } else {
        SizeCategory::Medium
    }
}
