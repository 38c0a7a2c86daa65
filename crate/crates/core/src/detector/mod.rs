//! Deterministic scaffolding around a single-shot detector: default boxes
//! with cell sub-division, ground-truth matching, loss terms and
//! non-maximum suppression.

mod anchors;
mod loss;
mod matching;
mod nms;

pub use anchors::{generate_default_boxes, AnchorConfig, DefaultBox, FeatureLevel};
pub use loss::{
    classification_loss, cross_entropy, encode_offsets, localization_loss, smooth_l1,
    ClassificationLoss, LocalizationLoss, HARD_NEGATIVE_RATIO, OFFSET_VARIANCES,
};
pub use matching::{match_boxes, Assignment, MatchAssignment, MATCH_IOU};
pub use nms::{nms, NMS_IOU, NMS_MAX_OUT};
