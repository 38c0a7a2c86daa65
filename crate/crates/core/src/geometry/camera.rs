use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::rotation::RigidTransform;
use crate::error::{Error, Result};

/// Pinhole intrinsics with zero skew and no distortion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawIntrinsics")]
pub struct CameraIntrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: u32,
    pub height: u32,
}

#[derive(Deserialize)]
struct RawIntrinsics {
    fx: f64,
    fy: f64,
    cx: f64,
    cy: f64,
    width: u32,
    height: u32,
}

impl TryFrom<RawIntrinsics> for CameraIntrinsics {
    type Error = Error;

    fn try_from(r: RawIntrinsics) -> Result<Self> {
        CameraIntrinsics::new(r.fx, r.fy, r.cx, r.cy, r.width, r.height)
    }
}

impl CameraIntrinsics {
    pub fn new(fx: f64, fy: f64, cx: f64, cy: f64, width: u32, height: u32) -> Result<Self> {
        if !(fx > 0.0 && fy > 0.0 && fx.is_finite() && fy.is_finite()) {
            return Err(Error::Invalid(format!("focal lengths must be positive, got {fx}, {fy}")));
        }
        if width == 0 || height == 0 {
            return Err(Error::Invalid(format!("image size must be positive, got {width}x{height}")));
        }
        if !(0.0..f64::from(width)).contains(&cx) || !(0.0..f64::from(height)).contains(&cy) {
            return Err(Error::Invalid(format!(
                "principal point ({cx}, {cy}) outside {width}x{height} image"
            )));
        }
        Ok(Self { fx, fy, cx, cy, width, height })
    }

    pub fn matrix(&self) -> Matrix3<f64> {
        Matrix3::new(self.fx, 0.0, self.cx, 0.0, self.fy, self.cy, 0.0, 0.0, 1.0)
    }

    /// `K⁻¹·(u, v, 1)`: the viewing ray of a pixel with unit z.
    pub fn back_project(&self, p: ImagePoint) -> Vector3<f64> {
        Vector3::new((p.u - self.cx) / self.fx, (p.v - self.cy) / self.fy, 1.0)
    }

    /// Projects a camera-frame direction or point with positive z.
    pub fn project_ray(&self, ray: &Vector3<f64>) -> ImagePoint {
        ImagePoint::new(self.fx * ray.x / ray.z + self.cx, self.fy * ray.y / ray.z + self.cy)
    }

    /// The image rectangle `[0, width] × [0, height]`.
    pub fn bounds(&self) -> super::BBox {
        super::BBox::from_size(f64::from(self.width), f64::from(self.height))
    }

    pub fn dims(&self) -> (u32, u32) {
        (self.width, self.height)
    }
}

/// A pixel location. The homogeneous scale is implicitly 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImagePoint {
    pub u: f64,
    pub v: f64,
}

impl ImagePoint {
    pub const fn new(u: f64, v: f64) -> Self {
        Self { u, v }
    }

    pub fn homogeneous(&self) -> Vector3<f64> {
        Vector3::new(self.u, self.v, 1.0)
    }

    pub fn distance(&self, other: &ImagePoint) -> f64 {
        (self.u - other.u).hypot(self.v - other.v)
    }
}

/// Intrinsics plus the world-to-camera transform.
///
/// Camera frames use x right, y down, z along the optical axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraModel {
    pub intrinsics: CameraIntrinsics,
    /// Maps world coordinates into the camera frame.
    pub world_to_camera: RigidTransform,
}

impl CameraModel {
    pub fn new(intrinsics: CameraIntrinsics, world_to_camera: RigidTransform) -> Self {
        Self { intrinsics, world_to_camera }
    }

    /// A camera whose frame is the world frame.
    pub fn at_origin(intrinsics: CameraIntrinsics) -> Self {
        Self { intrinsics, world_to_camera: RigidTransform::identity() }
    }

    pub fn to_camera(&self, point_world: &Vector3<f64>) -> Vector3<f64> {
        self.world_to_camera.apply(point_world)
    }

    /// Camera centre in world coordinates.
    pub fn centre(&self) -> Vector3<f64> {
        self.world_to_camera.inverse().translation
    }
}

/// Pinhole projection of a world point.
pub fn project(camera: &CameraModel, point_world: &Vector3<f64>) -> Result<ImagePoint> {
    let p = camera.to_camera(point_world);
    if !(p.z > 0.0) {
        return Err(Error::BehindCamera { depth: p.z });
    }
    Ok(camera.intrinsics.project_ray(&p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wide() -> CameraIntrinsics {
        CameraIntrinsics::new(625.0, 625.0, 320.0, 128.0, 640, 256).unwrap()
    }

    #[test]
    fn on_axis_point_hits_principal_point() {
        let cam = CameraModel::at_origin(wide());
        for z in [0.5, 20.0, 1e4] {
            let p = project(&cam, &Vector3::new(0.0, 0.0, z)).unwrap();
            assert_eq!((p.u, p.v), (320.0, 128.0));
        }
    }

    #[test]
    fn off_axis_point() {
        let cam = CameraModel::at_origin(wide());
        let p = project(&cam, &Vector3::new(1.0, 0.0, 20.0)).unwrap();
        assert_eq!((p.u, p.v), (351.25, 128.0));
    }

    #[test]
    fn zero_or_negative_depth_is_rejected() {
        let cam = CameraModel::at_origin(wide());
        assert!(matches!(
            project(&cam, &Vector3::new(1.0, 0.0, 0.0)),
            Err(Error::BehindCamera { .. })
        ));
        assert!(project(&cam, &Vector3::new(0.0, 0.0, -3.0)).is_err());
    }

    #[test]
    fn intrinsics_validation() {
        assert!(CameraIntrinsics::new(0.0, 1.0, 1.0, 1.0, 10, 10).is_err());
        assert!(CameraIntrinsics::new(1.0, 1.0, 10.0, 1.0, 10, 10).is_err());
        assert!(CameraIntrinsics::new(1.0, 1.0, 1.0, 1.0, 0, 10).is_err());
        let json = r#"{"fx":1,"fy":1,"cx":-1,"cy":1,"width":10,"height":10}"#;
        assert!(serde_json::from_str::<CameraIntrinsics>(json).is_err());
    }

    #[test]
    fn back_projection_inverts_projection() {
        let k = wide();
        let p = ImagePoint::new(17.5, 203.25);
        let q = k.project_ray(&(k.back_project(p) * 7.0));
        assert!(p.distance(&q) < 1e-12);
    }
}
