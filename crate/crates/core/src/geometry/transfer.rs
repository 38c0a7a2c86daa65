//! Point and box transfer between two cameras that share (approximately) a
//! centre of projection.
//!
//! For coincident centres the mapping `x_A ~ K_A · R_AB · K_B⁻¹ · x_B` is exact
//! and independent of scene depth. When the centres are `d` metres apart, a
//! point at depth `Z` lands `f_A · d / Z` pixels away from where it would be
//! projected directly; [`transfer_error_bound`] evaluates that offset.

use super::{BBox, CameraIntrinsics, ImagePoint, Rotation3};
use crate::error::{Error, Result};

/// Redraws a pixel of camera B in camera A.
///
/// `r_ab` rotates B-frame directions into the A frame.
pub fn transfer_point(
    x_b: ImagePoint,
    k_a: &CameraIntrinsics,
    k_b: &CameraIntrinsics,
    r_ab: &Rotation3,
) -> Result<ImagePoint> {
    if k_a == k_b && *r_ab == Rotation3::identity() {
        return Ok(x_b);
    }
    let ray = r_ab.apply(&k_b.back_project(x_b));
    if !(ray.z > 0.0) {
        return Err(Error::TransferDegenerate { z: ray.z });
    }
    Ok(k_a.project_ray(&ray))
}

/// Transfers the four corners of a box and returns their axis-aligned hull.
///
/// The result is not clipped to camera A's image.
pub fn transfer_box(
    box_b: &BBox,
    k_a: &CameraIntrinsics,
    k_b: &CameraIntrinsics,
    r_ab: &Rotation3,
) -> Result<BBox> {
    let mut corners = [ImagePoint::new(0.0, 0.0); 4];
    for (dst, c) in corners.iter_mut().zip(box_b.corners()) {
        *dst = transfer_point(c, k_a, k_b, r_ab)?;
    }
    BBox::hull(corners)
}

/// Pixel offset `f_A · d / Z` caused by treating camera centres `d` metres
/// apart as coincident, for a point at depth `Z`.
pub fn transfer_error_bound(f_a: f64, d: f64, z: f64) -> Result<f64> {
    if !(z > 0.0) {
        return Err(Error::Domain(format!("depth must be positive, got {z}")));
    }
    Ok(f_a * d / z)
}
