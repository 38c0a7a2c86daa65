//! Rig calibration: the two cameras, the rotation between them, their
//! separation and the radar-to-wide-camera extrinsics.
//!
//! Stored as JSON:
//!
//! ```json
//! {
//!   "wide":   { "fx": 625, "fy": 625, "cx": 320, "cy": 128, "width": 640, "height": 256 },
//!   "narrow": { "fx": 2500, "fy": 2500, "cx": 640, "cy": 480, "width": 1280, "height": 960 },
//!   "rotation_wide_from_narrow": [1, 0, 0, 0, 1, 0, 0, 0, 1],
//!   "separation_m": 0.032,
//!   "radar_to_wide": { "rotation": [1, 0, 0, 0, 1, 0, 0, 0, 1], "translation": [0, 0.9, 1.5] }
//! }
//! ```
//!
//! Rotations are row-major. `rotation_wide_from_narrow` maps narrow-camera
//! directions into the wide-camera frame.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{CameraIntrinsics, RigidTransform, Rotation3};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    /// Camera A: wide angle, the camera labels live in.
    pub wide: CameraIntrinsics,
    /// Camera B: long focal length.
    pub narrow: CameraIntrinsics,
    pub rotation_wide_from_narrow: Rotation3,
    /// Distance between the two camera centres, metres.
    pub separation_m: f64,
    /// Maps radar-frame points into the wide-camera frame.
    pub radar_to_wide: RigidTransform,
}

impl Calibration {
    pub fn validate(&self) -> Result<()> {
        if !(self.separation_m >= 0.0 && self.separation_m.is_finite()) {
            return Err(Error::Calibration(format!(
                "camera separation must be a non-negative distance, got {}",
                self.separation_m
            )));
        }
        if self.radar_to_wide.translation.iter().any(|v| !v.is_finite()) {
            return Err(Error::Calibration("radar translation is not finite".into()));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let calib: Calibration = serde_json::from_str(text)
            .map_err(|e| Error::Calibration(format!("cannot parse calibration: {e}")))?;
        calib.validate()?;
        Ok(calib)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Calibration(format!("cannot read calibration {}: {e}", path.display()))
        })?;
        Self::from_json(&text)
    }
}
