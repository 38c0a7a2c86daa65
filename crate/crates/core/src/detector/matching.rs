use super::DefaultBox;
use crate::geometry::BBox;

/// IoU at which a default box is matched to a ground-truth box.
pub const MATCH_IOU: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Assignment {
    Negative,
    /// Index into the ground-truth list.
    Matched(usize),
}

/// One [`Assignment`] per default box.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchAssignment(pub Vec<Assignment>);

impl MatchAssignment {
    pub fn positives(&self) -> usize {
        self.0.iter().filter(|a| matches!(a, Assignment::Matched(_))).count()
    }

    pub fn matched_to(&self, gt: usize) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(move |(_, a)| **a == Assignment::Matched(gt))
            .map(|(i, _)| i)
    }
}

/// Assigns default boxes to ground truth (all in normalized coordinates).
///
/// Each ground-truth box first claims the default box it overlaps most,
/// skipping defaults already claimed by an earlier ground truth, so every
/// ground truth ends up with at least one match whenever there are enough
/// default boxes. Every other default box is matched to its highest-IoU
/// ground truth if that IoU is at least `iou_threshold`. Ties go to the
/// lower index in both directions.
pub fn match_boxes(defaults: &[DefaultBox], gts: &[BBox], iou_threshold: f64) -> MatchAssignment {
    let mut out = vec![Assignment::Negative; defaults.len()];
    if gts.is_empty() || defaults.is_empty() {
        return MatchAssignment(out);
    }
    let corners: Vec<BBox> = defaults.iter().map(DefaultBox::to_bbox).collect();
    let ious: Vec<Vec<f64>> = gts.iter().map(|g| corners.iter().map(|d| g.iou(d)).collect()).collect();

    let mut forced = vec![false; defaults.len()];
    for (g, row) in ious.iter().enumerate() {
        let best = row
            .iter()
            .enumerate()
            .filter(|(d, _)| !forced[*d])
            .fold(None, |best: Option<(usize, f64)>, (d, &v)| match best {
                Some((_, bv)) if bv >= v => best,
                _ => Some((d, v)),
            });
        if let Some((d, _)) = best {
            forced[d] = true;
            out[d] = Assignment::Matched(g);
        }
    }

    for (d, slot) in out.iter_mut().enumerate() {
        if forced[d] {
            continue;
        }
        let (g, v) = ious
            .iter()
            .enumerate()
            .map(|(g, row)| (g, row[d]))
            .fold((0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best });
        if v >= iou_threshold {
            *slot = Assignment::Matched(g);
        }
    }
    MatchAssignment(out)
}
