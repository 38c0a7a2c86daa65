use super::{compute_joint_region, overlap_with_joint, Detection, Source};
use crate::calibration::Calibration;
use crate::error::{Error, Result};
use crate::geometry::transfer_box;

/// Overlap above which a wide-camera detection is replaced by the narrow
/// camera's view of the joint region.
pub const DEFAULT_TAU: f64 = 0.5;

/// Combines one frame's wide-camera (A) and narrow-camera (B) detections
/// into a single label set in A's pixel space.
///
/// Every B detection is transferred into A, clipped to A's image and tagged
/// [`Source::Transferred`]; transferred boxes that fall entirely outside A are
/// dropped. An A detection survives only if its overlap with the joint region
/// is at most `tau`. No duplicate suppression is done between the two sets.
///
/// Output is sorted by descending objectness, ties by ascending `x_min`.
pub fn merge_detections(
    dets_a: &[Detection],
    dets_b: &[Detection],
    calib: &Calibration,
    tau: f64,
) -> Result<Vec<Detection>> {
    if !(tau >= 0.0) {
        return Err(Error::Config(format!("overlap threshold must be >= 0, got {tau}")));
    }
    let (k_a, k_b, r_ab) = (&calib.wide, &calib.narrow, &calib.rotation_wide_from_narrow);
    let joint = compute_joint_region(k_a, k_b, r_ab, &k_b.bounds())?;
    let bounds_a = k_a.bounds();

    let mut out: Vec<Detection> = dets_a
        .iter()
        .filter(|d| overlap_with_joint(&d.bbox, &joint) <= tau)
        .cloned()
        .collect();

    for det in dets_b {
        let moved = transfer_box(&det.bbox, k_a, k_b, r_ab)
            .map_err(|e| Error::Calibration(format!("cannot transfer detection: {e}")))?
            .clip(&bounds_a);
        if moved.area() > 0.0 {
            let mut t = det.with_bbox(moved);
            t.source = Source::Transferred;
            out.push(t);
        }
    }

    out.sort_by(|a, b| {
        b.objectness
            .total_cmp(&a.objectness)
            .then(a.bbox.x_min().total_cmp(&b.bbox.x_min()))
    });
    Ok(out)
}
