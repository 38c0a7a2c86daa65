use crate::geometry::BBox;
use crate::labeling::{confidence_order, Detection};

/// IoU required for a detection to count as finding a ground-truth box.
pub const EVAL_IOU: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// Matched the ground-truth box with this index.
    TruePositive(usize),
    FalsePositive,
    /// Excluded from scoring (matched an ignored ground truth, or an
    /// unmatched detection outside the evaluated category).
    Ignored,
}

/// Matching result for one image.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameMatch {
    /// One outcome per detection, in input order.
    pub outcomes: Vec<Outcome>,
    /// Whether each ground-truth box was found.
    pub found: Vec<bool>,
}

/// Greedy matching in descending confidence (ties by ascending `x_min`):
/// each detection takes the highest-IoU ground truth not yet taken, if that
/// IoU reaches `iou_threshold`.
pub fn match_detections(dets: &[Detection], gts: &[BBox], iou_threshold: f64) -> FrameMatch {
    match_with_ignore(dets, gts, &vec![false; gts.len()], &vec![false; dets.len()], iou_threshold)
}

/// [`match_detections`] with ignore flags.
///
/// A detection prefers scored ground truth over ignored ground truth; if it
/// can only reach an ignored box it consumes that box and is itself
/// ignored. An unmatched detection flagged in `det_ignore` is ignored rather
/// than counted as a false positive.
pub fn match_with_ignore(
    dets: &[Detection],
    gts: &[BBox],
    gt_ignore: &[bool],
    det_ignore: &[bool],
    iou_threshold: f64,
) -> FrameMatch {
    let mut order: Vec<usize> = (0..dets.len()).collect();
    order.sort_by(|&a, &b| confidence_order(&dets[a], &dets[b]).then(a.cmp(&b)));

    let mut taken = vec![false; gts.len()];
    let mut outcomes = vec![Outcome::FalsePositive; dets.len()];
    for d in order {
        // (ignored?, -iou) ordering: scored boxes first, then higher IoU, then lower index
        let mut best: Option<(bool, f64, usize)> = None;
        for (g, gt) in gts.iter().enumerate() {
            if taken[g] {
                continue;
            }
            let v = gt.iou(&dets[d].bbox);
            if v < iou_threshold {
                continue;
            }
            let better = match best {
                None => true,
                Some((bi, bv, _)) => (gt_ignore[g], -v) < (bi, -bv),
            };
            if better {
                best = Some((gt_ignore[g], v, g));
            }
        }
        outcomes[d] = match best {
            Some((false, _, g)) => {
                taken[g] = true;
                Outcome::TruePositive(g)
            }
            Some((true, _, g)) => {
                taken[g] = true;
                Outcome::Ignored
            }
            None if det_ignore[d] => Outcome::Ignored,
            None => Outcome::FalsePositive,
        };
    }
    let found = outcomes
        .iter()
        .fold(vec![false; gts.len()], |mut f, o| {
            if let Outcome::TruePositive(g) = o {
                f[*g] = true;
            }
            f
        });
    FrameMatch { outcomes, found }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::labeling::{ObjectClass, Source};

    fn det(b: [f64; 4], conf: f64) -> Detection {
        let mut d = Detection::certain(BBox::try_from(b).unwrap(), ObjectClass::Vehicle, Source::Wide);
        d.objectness = conf;
        d
    }

    fn bx(b: [f64; 4]) -> BBox {
        BBox::try_from(b).unwrap()
    }

    #[test]
    fn exact_hit_is_true_positive() {
        let m = match_detections(&[det([0.0, 0.0, 10.0, 10.0], 0.5)], &[bx([0.0, 0.0, 10.0, 10.0])], EVAL_IOU);
        assert_eq!(m.outcomes, vec![Outcome::TruePositive(0)]);
        assert_eq!(m.found, vec![true]);
    }

    #[test]
    fn second_detection_of_same_object_is_false_positive() {
        let dets = [det([0.0, 0.0, 10.0, 10.0], 0.6), det([0.0, 0.0, 10.0, 10.0], 0.9)];
        let m = match_detections(&dets, &[bx([0.0, 0.0, 10.0, 10.0])], EVAL_IOU);
        assert_eq!(m.outcomes, vec![Outcome::FalsePositive, Outcome::TruePositive(0)]);
    }

    #[test]
    fn weak_overlap_is_false_positive() {
        // IoU = 40 / 100 with a 10x10 ground truth and a contained 4x10 detection
        let m = match_detections(&[det([0.0, 0.0, 4.0, 10.0], 0.9)], &[bx([0.0, 0.0, 10.0, 10.0])], EVAL_IOU);
        assert_eq!(m.outcomes, vec![Outcome::FalsePositive]);
        assert_eq!(m.found, vec![false]);
    }

    #[test]
    fn detection_falls_through_to_unmatched_gt() {
        let gts = [bx([0.0, 0.0, 10.0, 10.0]), bx([1.0, 0.0, 11.0, 10.0])];
        let dets = [det([0.0, 0.0, 10.0, 10.0], 0.9), det([0.0, 0.0, 10.0, 10.0], 0.8)];
        let m = match_detections(&dets, &gts, EVAL_IOU);
        assert_eq!(m.outcomes, vec![Outcome::TruePositive(0), Outcome::TruePositive(1)]);
    }

    #[test]
    fn ignored_ground_truth_swallows_detection() {
        let gts = [bx([0.0, 0.0, 10.0, 10.0])];
        let m = match_with_ignore(&[det([0.0, 0.0, 10.0, 10.0], 0.9)], &gts, &[true], &[false], EVAL_IOU);
        assert_eq!(m.outcomes, vec![Outcome::Ignored]);
        assert_eq!(m.found, vec![false]);
    }
}
