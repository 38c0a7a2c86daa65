use crate::labeling::{confidence_order, Detection};

/// Boxes overlapping a kept box by more than this IoU are suppressed.
pub const NMS_IOU: f64 = 0.45;
/// Cap on detections returned per image.
pub const NMS_MAX_OUT: usize = 200;

/// Greedy per-class non-maximum suppression.
///
/// Detections are visited by descending confidence (ties by ascending
/// `x_min`, then input order); one is kept unless its IoU with an already
/// kept detection of the same class exceeds `iou_threshold`. The result is
/// in visiting order and truncated to `max_out`.
pub fn nms(detections: &[Detection], iou_threshold: f64, max_out: usize) -> Vec<Detection> {
    let mut order: Vec<&Detection> = detections.iter().collect();
    order.sort_by(|a, b| confidence_order(a, b));
    let mut kept: Vec<Detection> = Vec::new();
    for det in order {
        if kept.len() == max_out {
            break;
        }
        let suppressed = kept
            .iter()
            .any(|k| k.class == det.class && k.bbox.iou(&det.bbox) > iou_threshold);
        if !suppressed {
            kept.push(det.clone());
        }
    }
    kept
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::BBox;
    use crate::labeling::{ObjectClass, Source};

    fn det(b: [f64; 4], conf: f64) -> Detection {
        let mut d = Detection::certain(BBox::try_from(b).unwrap(), ObjectClass::Vehicle, Source::Wide);
        d.objectness = conf;
        d
    }

    #[test]
    fn identical_boxes_keep_the_best() {
        let out = nms(&[det([0.0, 0.0, 10.0, 10.0], 0.8), det([0.0, 0.0, 10.0, 10.0], 0.9)], NMS_IOU, NMS_MAX_OUT);
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].objectness, 0.9);
    }

    #[test]
    fn low_overlap_keeps_both() {
        // 10x10 boxes offset by 5 in x: 50 / 150 = 1/3 < 0.45... use IoU 0.3 exactly
        // intersection 30 (3 x 10), union 170: IoU 0.176; shift so IoU = 0.3:
        // overlap w: w*10 / (200 - w*10) = 0.3  =>  w = 60/13
        let w = 60.0 / 13.0;
        let a = det([0.0, 0.0, 10.0, 10.0], 0.9);
        let b = det([10.0 - w, 0.0, 20.0 - w, 10.0], 0.8);
        assert!((a.bbox.iou(&b.bbox) - 0.3).abs() < 1e-12);
        assert_eq!(nms(&[a, b], NMS_IOU, NMS_MAX_OUT).len(), 2);
    }

    #[test]
    fn classes_do_not_suppress_each_other() {
        let a = det([0.0, 0.0, 10.0, 10.0], 0.9);
        let mut b = det([0.0, 0.0, 10.0, 10.0], 0.8);
        b.class = ObjectClass::Pedestrian;
        b.class_probs = vec![0.0, 1.0];
        assert_eq!(nms(&[a, b], NMS_IOU, NMS_MAX_OUT).len(), 2);
    }

    #[test]
    fn output_is_capped_at_most_confident() {
        let dets: Vec<_> = (0..300)
            .map(|i| det([i as f64 * 20.0, 0.0, i as f64 * 20.0 + 10.0, 10.0], (i as f64 + 1.0) / 301.0))
            .collect();
        let out = nms(&dets, NMS_IOU, NMS_MAX_OUT);
        assert_eq!(out.len(), 200);
        let min_kept = out.iter().map(|d| d.confidence()).fold(f64::INFINITY, f64::min);
        assert!((min_kept - 101.0 / 301.0).abs() < 1e-12);
    }
}
