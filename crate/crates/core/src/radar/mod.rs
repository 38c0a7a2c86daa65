//! Radar targets, ego-motion compensation of range rate, projection into the
//! wide camera and rendering of the range / range-rate image channels.
//!
//! The radar is planar. Its frame follows the camera convention (x right,
//! y down, z along boresight), so a target at range `r` and bearing `b`
//! (positive to the right) sits at `(r·sin b, 0, r·cos b)`.

mod encode;
mod render;
mod stats;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{project, CameraModel, ImagePoint, RigidTransform};

pub use encode::{encode_range, encode_range_rate, RadarEncoding, BACKGROUND};
pub use render::{render_channels, GrayImage, RadarChannels, RenderConfig};
pub use stats::{channel_stats, ChannelStats, MeanStd};

/// Upper bound on targets reported per beam in one scan.
pub const MAX_TARGETS_PER_BEAM: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Beam {
    MediumWide,
    LongNarrow,
}

impl Beam {
    pub const ALL: [Beam; 2] = [Beam::MediumWide, Beam::LongNarrow];
}

/// Angular and range coverage of one beam.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamSpec {
    pub beam: Beam,
    pub half_angle_rad: f64,
    pub max_range_m: f64,
}

impl BeamSpec {
    /// ±50°, 60 m.
    pub fn medium_wide() -> Self {
        Self { beam: Beam::MediumWide, half_angle_rad: 50f64.to_radians(), max_range_m: 60.0 }
    }

    /// ±11°, 150 m.
    pub fn long_narrow() -> Self {
        Self { beam: Beam::LongNarrow, half_angle_rad: 11f64.to_radians(), max_range_m: 150.0 }
    }

    pub fn covers(&self, range_m: f64, bearing_rad: f64) -> bool {
        bearing_rad.abs() <= self.half_angle_rad && (0.0..=self.max_range_m).contains(&range_m)
    }
}

/// One target reported by the radar's internal tracker.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadarTarget {
    pub range_m: f64,
    /// Radians from boresight, positive to the right.
    pub bearing_rad: f64,
    /// Radial velocity; negative when closing.
    pub range_rate_mps: f64,
    pub amplitude_db: f64,
    pub beam: Beam,
    pub timestamp_us: i64,
}

impl RadarTarget {
    pub fn validate(&self) -> Result<()> {
        if !(self.range_m >= 0.0) {
            return Err(Error::Invalid(format!("target range {} is negative", self.range_m)));
        }
        if ![self.bearing_rad, self.range_rate_mps, self.amplitude_db].iter().all(|v| v.is_finite())
        {
            return Err(Error::Invalid("target has non-finite measurements".into()));
        }
        Ok(())
    }

    /// Unit vector from the sensor toward the target.
    pub fn direction(&self) -> Vector3<f64> {
        Vector3::new(self.bearing_rad.sin(), 0.0, self.bearing_rad.cos())
    }

    /// Cartesian position in the radar frame.
    pub fn position(&self) -> Vector3<f64> {
        self.direction() * self.range_m
    }
}

/// Targets reported at one scan time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadarScan {
    pub timestamp_us: i64,
    pub targets: Vec<RadarTarget>,
}

impl RadarScan {
    pub fn new(timestamp_us: i64, targets: Vec<RadarTarget>) -> Result<Self> {
        for beam in Beam::ALL {
            let n = targets.iter().filter(|t| t.beam == beam).count();
            if n > MAX_TARGETS_PER_BEAM {
                return Err(Error::Invalid(format!(
                    "{n} targets on beam {beam:?}; at most {MAX_TARGETS_PER_BEAM} allowed"
                )));
            }
        }
        for t in &targets {
            t.validate()?;
        }
        Ok(Self { timestamp_us, targets })
    }

    pub fn empty(timestamp_us: i64) -> Self {
        Self { timestamp_us, targets: Vec::new() }
    }
}

/// Platform motion estimate, expressed in the radar frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EgoMotion {
    #[serde(with = "crate::geometry::vec3_serde")]
    pub velocity_mps: Vector3<f64>,
    pub yaw_rate_rps: f64,
    pub timestamp_us: i64,
}

impl EgoMotion {
    pub fn stationary(timestamp_us: i64) -> Self {
        Self { velocity_mps: Vector3::zeros(), yaw_rate_rps: 0.0, timestamp_us }
    }

    /// Straight-line motion along boresight.
    pub fn forward(speed_mps: f64, timestamp_us: i64) -> Self {
        Self { velocity_mps: Vector3::new(0.0, 0.0, speed_mps), yaw_rate_rps: 0.0, timestamp_us }
    }
}

/// Removes the platform's own motion from a target's range rate, so static
/// structure reads zero. Yaw-rate lever-arm terms are not applied.
pub fn compensate_ego_motion(target: &RadarTarget, ego: &EgoMotion) -> RadarTarget {
    RadarTarget {
        range_rate_mps: target.range_rate_mps + ego.velocity_mps.dot(&target.direction()),
        ..*target
    }
}

/// Projects a target into the camera: `x = P · T · X_R`.
///
/// Fails with [`Error::BehindCamera`] when the target is not in front of
/// the camera; callers drop such targets.
pub fn project_target(
    target: &RadarTarget,
    radar_to_camera: &RigidTransform,
    camera: &CameraModel,
) -> Result<ImagePoint> {
    let in_camera_world = radar_to_camera.apply(&target.position());
    project(camera, &in_camera_world)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::CameraIntrinsics;
    use approx::assert_abs_diff_eq;

    fn target(range: f64, bearing: f64, rr: f64) -> RadarTarget {
        RadarTarget {
            range_m: range,
            bearing_rad: bearing,
            range_rate_mps: rr,
            amplitude_db: 10.0,
            beam: Beam::LongNarrow,
            timestamp_us: 0,
        }
    }

    fn camera() -> CameraModel {
        CameraModel::at_origin(CameraIntrinsics::new(625.0, 625.0, 320.0, 128.0, 640, 256).unwrap())
    }

    #[test]
    fn static_targets_compensate_to_zero() {
        let ego = EgoMotion::forward(10.0, 0);
        let ahead = compensate_ego_motion(&target(20.0, 0.0, -10.0), &ego);
        assert_eq!(ahead.range_rate_mps, 0.0);
        let side = compensate_ego_motion(&target(20.0, 60f64.to_radians(), -5.0), &ego);
        assert_abs_diff_eq!(side.range_rate_mps, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn zero_ego_motion_is_identity() {
        let t = target(33.0, 0.2, 4.5);
        assert_eq!(compensate_ego_motion(&t, &EgoMotion::stationary(0)), t);
    }

    #[test]
    fn boresight_projects_to_principal_point() {
        let p = project_target(&target(10.0, 0.0, 0.0), &RigidTransform::identity(), &camera())
            .unwrap();
        assert_eq!((p.u, p.v), (320.0, 128.0));
    }

    #[test]
    fn bearing_offsets_horizontally() {
        // tan(bearing) = 0.1: the ray (0.1, 0, 1) lands 625 * 0.1 px right of centre
        let p = project_target(&target(10.0, 0.1f64.atan(), 0.0), &RigidTransform::identity(), &camera())
            .unwrap();
        assert_abs_diff_eq!(p.u, 382.5, epsilon = 1e-9);
        assert_abs_diff_eq!(p.v, 128.0, epsilon = 1e-12);
    }

    #[test]
    fn behind_camera_is_signalled() {
        let t = target(10.0, 0.0, 0.0);
        let behind = RigidTransform::from_translation(Vector3::new(0.0, 0.0, -20.0));
        assert!(matches!(project_target(&t, &behind, &camera()), Err(Error::BehindCamera { .. })));
    }

    #[test]
    fn scan_limits_per_beam() {
        let many: Vec<_> = (0..65).map(|i| target(i as f64, 0.0, 0.0)).collect();
        assert!(RadarScan::new(0, many.clone()).is_err());
        let mut split = many;
        for t in split.iter_mut().take(30) {
            t.beam = Beam::MediumWide;
        }
        assert!(RadarScan::new(0, split).is_ok());
        assert!(RadarScan::new(0, vec![target(-1.0, 0.0, 0.0)]).is_err());
    }
}
