use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::calibration::Calibration;
use crate::error::{Error, Result};
use crate::geometry::{
    project, BBox, CameraIntrinsics, CameraModel, RigidTransform, Rotation3,
};
use crate::radar::BeamSpec;

/// Camera pair plus radar, all mounted on the ego platform.
///
/// The platform frame is the wide camera's frame: x right, y down, z forward.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SensorRig {
    pub wide: CameraIntrinsics,
    pub narrow: CameraIntrinsics,
    /// Narrow camera centre in the wide camera frame, metres.
    #[serde(with = "crate::geometry::vec3_serde")]
    pub narrow_offset_m: Vector3<f64>,
    /// Rotates narrow-camera directions into the wide frame.
    pub rotation_wide_from_narrow: Rotation3,
    /// Maps radar-frame points into the wide camera frame.
    pub radar_to_wide: RigidTransform,
    pub medium_beam: BeamSpec,
    pub long_beam: BeamSpec,
}

impl Default for SensorRig {
    /// 640×256 wide camera (f = 625 px), 1280×960 narrow camera (f = 2500 px)
    /// 3.2 cm to its right with a slight yaw and pitch, and a radar 0.9 m
    /// below and 1.5 m ahead of the wide camera.
    fn default() -> Self {
        Self {
            wide: CameraIntrinsics { fx: 625.0, fy: 625.0, cx: 320.0, cy: 128.0, width: 640, height: 256 },
            narrow: CameraIntrinsics {
                fx: 2500.0,
                fy: 2500.0,
                cx: 640.0,
                cy: 480.0,
                width: 1280,
                height: 960,
            },
            narrow_offset_m: Vector3::new(0.032, 0.0, 0.0),
            rotation_wide_from_narrow: Rotation3::from_yaw_pitch_roll(
                0.4f64.to_radians(),
                -0.2f64.to_radians(),
                0.0,
            ),
            radar_to_wide: RigidTransform::from_translation(Vector3::new(0.0, 0.9, 1.5)),
            medium_beam: BeamSpec::medium_wide(),
            long_beam: BeamSpec::long_narrow(),
        }
    }
}

impl SensorRig {
    pub fn validate(&self) -> Result<()> {
        CameraIntrinsics::new(self.wide.fx, self.wide.fy, self.wide.cx, self.wide.cy, self.wide.width, self.wide.height)?;
        CameraIntrinsics::new(
            self.narrow.fx,
            self.narrow.fy,
            self.narrow.cx,
            self.narrow.cy,
            self.narrow.width,
            self.narrow.height,
        )?;
        if self.narrow_offset_m.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("narrow camera offset is not finite".into()));
        }
        for b in [self.medium_beam, self.long_beam] {
            if !(b.half_angle_rad > 0.0 && b.max_range_m > 0.0) {
                return Err(Error::Config(format!("beam {:?} has an empty field of view", b.beam)));
            }
        }
        Ok(())
    }

    pub fn separation_m(&self) -> f64 {
        self.narrow_offset_m.norm()
    }

    pub fn calibration(&self) -> Calibration {
        Calibration {
            wide: self.wide,
            narrow: self.narrow,
            rotation_wide_from_narrow: self.rotation_wide_from_narrow,
            separation_m: self.separation_m(),
            radar_to_wide: self.radar_to_wide,
        }
    }

    /// Wide camera for a platform at world position `ego` (no rotation).
    pub fn wide_camera(&self, ego: &Vector3<f64>) -> CameraModel {
        CameraModel::new(self.wide, RigidTransform::from_translation(-ego))
    }

    /// Narrow camera for a platform at world position `ego`.
    pub fn narrow_camera(&self, ego: &Vector3<f64>) -> CameraModel {
        let rt = self.rotation_wide_from_narrow.transpose();
        let centre = ego + self.narrow_offset_m;
        CameraModel::new(self.narrow, RigidTransform::new(rt, -rt.apply(&centre)))
    }

    /// World → radar frame for a platform at `ego`.
    pub fn world_to_radar(&self, ego: &Vector3<f64>) -> RigidTransform {
        self.radar_to_wide.inverse().compose(&RigidTransform::from_translation(-ego))
    }

    /// The narrow camera's field of view drawn in the wide image, computed
    /// by projecting far points along the narrow camera's corner rays through
    /// the wide camera model, then clipped to the wide image.
    pub fn analytic_joint_region(&self) -> Result<BBox> {
        let origin = Vector3::zeros();
        let wide = self.wide_camera(&origin);
        let centre = self.narrow_offset_m;
        let corners = self.narrow.bounds().corners();
        let mut pts = Vec::with_capacity(4);
        for c in corners {
            let dir = self.rotation_wide_from_narrow.apply(&self.narrow.back_project(c)).normalize();
            pts.push(project(&wide, &(centre + dir * 1e9))?);
        }
        Ok(BBox::hull(pts)?.clip(&self.wide.bounds()))
    }
}

