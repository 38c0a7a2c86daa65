use crate::error::{Error, Result};
use crate::geometry::{transfer_box, BBox, CameraIntrinsics, Rotation3};

/// The part of the wide image that the narrow camera also sees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointRegion {
    pub region: BBox,
}

impl JointRegion {
    pub fn area(&self) -> f64 {
        self.region.area()
    }
}

/// Transfers the narrow image's outline into the wide image and takes its
/// axis-aligned bounding box, clipped to the wide image.
pub fn compute_joint_region(
    k_a: &CameraIntrinsics,
    k_b: &CameraIntrinsics,
    r_ab: &Rotation3,
    bounds_b: &BBox,
) -> Result<JointRegion> {
    let outline = transfer_box(bounds_b, k_a, k_b, r_ab)
        .map_err(|e| Error::Calibration(format!("narrow image outline cannot be transferred: {e}")))?;
    Ok(JointRegion { region: outline.clip(&k_a.bounds()) })
}

/// `area(a ∩ b) / min(area(a), area(b))`, or 0 when either area is 0.
pub fn overlap_min_ratio(a: &BBox, b: &BBox) -> f64 {
    let denom = a.area().min(b.area());
    if denom <= 0.0 {
        return 0.0;
    }
    (a.intersection_area(b) / denom).clamp(0.0, 1.0)
}

/// Overlap of a detection with the joint region, normalised by the smaller
/// of the two areas.
pub fn overlap_with_joint(bbox: &BBox, joint: &JointRegion) -> f64 {
    overlap_min_ratio(bbox, &joint.region)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn bx(a: f64, b: f64, c: f64, d: f64) -> BBox {
        BBox::new(a, b, c, d).unwrap()
    }

    #[test]
    fn identity_cameras_give_full_image() {
        let k = CameraIntrinsics::new(625.0, 625.0, 320.0, 128.0, 640, 256).unwrap();
        let j = compute_joint_region(&k, &k, &Rotation3::identity(), &k.bounds()).unwrap();
        assert_eq!(j.region, k.bounds());
    }

    #[test]
    fn focal_ratio_four_gives_centred_quarter() {
        let k_a = CameraIntrinsics::new(500.0, 500.0, 640.0, 480.0, 1280, 960).unwrap();
        let k_b = CameraIntrinsics::new(2000.0, 2000.0, 640.0, 480.0, 1280, 960).unwrap();
        let j = compute_joint_region(&k_a, &k_b, &Rotation3::identity(), &k_b.bounds()).unwrap();
        assert_abs_diff_eq!(j.region.width(), 320.0, epsilon = 1e-9);
        assert_abs_diff_eq!(j.region.height(), 240.0, epsilon = 1e-9);
        assert_abs_diff_eq!(j.region.x_min(), 480.0, epsilon = 1e-9);
        assert_abs_diff_eq!(j.region.y_min(), 360.0, epsilon = 1e-9);
    }

    #[test]
    fn overlap_cases() {
        let joint = JointRegion { region: bx(0.0, 0.0, 1000.0, 1000.0) };
        assert_eq!(overlap_with_joint(&bx(10.0, 10.0, 20.0, 20.0), &joint), 1.0);
        // 10x10 box, half of it inside
        assert_eq!(overlap_with_joint(&bx(995.0, 0.0, 1005.0, 10.0), &joint), 0.5);
        assert_eq!(overlap_with_joint(&bx(2000.0, 0.0, 2010.0, 10.0), &joint), 0.0);
        // degenerate box
        assert_eq!(overlap_with_joint(&bx(5.0, 5.0, 5.0, 50.0), &joint), 0.0);
    }
}
