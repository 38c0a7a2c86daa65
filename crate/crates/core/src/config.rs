//! Pipeline parameters shared by every command.
//!
//! Written as TOML by the command-line tool:
//!
//! ```toml
//! seed = 7
//!
//! [paths]
//! calibration = "calibration.json"
//! output = "out"
//!
//! [labeling]
//! tau = 0.5
//!
//! [sync]
//! max_offset_us = 10000
//! subsample = 5
//!
//! [nms]
//! iou = 0.45
//! max_out = 200
//!
//! [evaluation]
//! iou = 0.5
//!
//! [radar]
//! radius_px = 2
//! [radar.encoding]
//! max_range_m = 100.0
//! rate_scale = 5.0
//! rate_null = 127
//!
//! [split]
//! train = 0.7
//! val = 0.1
//! test = 0.2
//! ```
//!
//! Every key is optional; missing keys take the defaults shown.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::dataset::SplitFractions;
use crate::detector::{NMS_IOU, NMS_MAX_OUT};
use crate::error::{Error, Result};
use crate::evaluation::EVAL_IOU;
use crate::labeling::DEFAULT_TAU;
use crate::radar::RenderConfig;
use crate::sync::{DEFAULT_MAX_OFFSET_US, DEFAULT_SUBSAMPLE};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathsConfig {
    pub calibration: Option<PathBuf>,
    pub scene: Option<PathBuf>,
    pub wide_detections: Option<PathBuf>,
    pub narrow_detections: Option<PathBuf>,
    pub detections: Option<PathBuf>,
    pub ground_truth: Option<PathBuf>,
    pub scans: Option<PathBuf>,
    pub ego_track: Option<PathBuf>,
    pub images: Option<PathBuf>,
    pub anchors: Option<PathBuf>,
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LabelingConfig {
    pub tau: f64,
}

impl Default for LabelingConfig {
    fn default() -> Self {
        Self { tau: DEFAULT_TAU }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyncConfig {
    pub max_offset_us: i64,
    pub subsample: usize,
}

impl Default for SyncConfig {
    fn default() -> Self {
        Self { max_offset_us: DEFAULT_MAX_OFFSET_US, subsample: DEFAULT_SUBSAMPLE }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NmsConfig {
    pub iou: f64,
    pub max_out: usize,
}

impl Default for NmsConfig {
    fn default() -> Self {
        Self { iou: NMS_IOU, max_out: NMS_MAX_OUT }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluationConfig {
    pub iou: f64,
}

impl Default for EvaluationConfig {
    fn default() -> Self {
        Self { iou: EVAL_IOU }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    pub paths: PathsConfig,
    pub labeling: LabelingConfig,
    pub sync: SyncConfig,
    pub nms: NmsConfig,
    pub evaluation: EvaluationConfig,
    pub radar: RenderConfig,
    pub split: SplitFractions,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            seed: 7,
            paths: PathsConfig::default(),
            labeling: LabelingConfig::default(),
            sync: SyncConfig::default(),
            nms: NmsConfig::default(),
            evaluation: EvaluationConfig::default(),
            radar: RenderConfig::default(),
            split: SplitFractions::default(),
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} = {v} must lie in [0, 1]")))
            }
        };
        if !(self.labeling.tau >= 0.0 && self.labeling.tau.is_finite()) {
            return Err(Error::Config(format!("labeling.tau = {} must be non-negative", self.labeling.tau)));
        }
        if self.sync.max_offset_us < 0 {
            return Err(Error::Config("sync.max_offset_us must be non-negative".into()));
        }
        if self.sync.subsample == 0 {
            return Err(Error::Config("sync.subsample must be at least 1".into()));
        }
        unit("nms.iou", self.nms.iou)?;
        unit("evaluation.iou", self.evaluation.iou)?;
        self.radar.encoding.validate()?;
        self.split.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = PipelineConfig::default();
        c.validate().unwrap();
        assert_eq!(c.labeling.tau, 0.5);
        assert_eq!(c.sync.max_offset_us, 10_000);
        assert_eq!(c.sync.subsample, 5);
        assert_eq!((c.nms.iou, c.nms.max_out), (0.45, 200));
    }

    #[test]
    fn out_of_range_values_are_rejected() {
        let mut c = PipelineConfig::default();
        c.sync.subsample = 0;
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        let mut c = PipelineConfig::default();
        c.nms.iou = 1.5;
        assert!(c.validate().is_err());
        let mut c = PipelineConfig::default();
        c.labeling.tau = -0.1;
        assert!(c.validate().is_err());
    }
}
