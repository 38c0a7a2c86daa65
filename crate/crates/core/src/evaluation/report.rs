use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{average_precision, classify_size, match_with_ignore, Outcome, PrCurve, SizeCategory};
use crate::geometry::BBox;
use crate::labeling::Detection;

/// Detections and ground truth of one image.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EvalFrame {
    pub detections: Vec<Detection>,
    pub ground_truth: Vec<BBox>,
}

/// Result for one size category (or for all sizes).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryResult {
    /// `None` when the category has no ground truth.
    pub ap: Option<f64>,
    pub curve: PrCurve,
}

impl CategoryResult {
    fn from_curve(curve: PrCurve) -> Self {
        Self { ap: average_precision(&curve), curve }
    }
}

/// Per-size and overall results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeReport {
    pub small: CategoryResult,
    pub medium: CategoryResult,
    pub large: CategoryResult,
    pub all: CategoryResult,
}

impl SizeReport {
    pub fn category(&self, c: SizeCategory) -> &CategoryResult {
        match c {
            SizeCategory::Small => &self.small,
            SizeCategory::Medium => &self.medium,
            SizeCategory::Large => &self.large,
        }
    }

    /// `(name, result)` for small, medium, large, all.
    pub fn entries(&self) -> [(&'static str, &CategoryResult); 4] {
        [("small", &self.small), ("medium", &self.medium), ("large", &self.large), ("all", &self.all)]
    }

    /// Pretty JSON with categories in a fixed order.
    pub fn to_json(&self) -> String {
        let ordered: Vec<_> = self
            .entries()
            .into_iter()
            .map(|(name, r)| {
                serde_json::json!({
                    "category": name,
                    "ap": r.ap,
                    "true_positives": r.curve.true_positives,
                    "false_positives": r.curve.false_positives,
                    "false_negatives": r.curve.false_negatives,
                    "num_ground_truth": r.curve.num_ground_truth,
                    "curve": r.curve.points.iter().map(|p| [p.confidence, p.precision, p.recall]).collect::<Vec<_>>(),
                })
            })
            .collect();
        serde_json::to_string_pretty(&serde_json::json!({ "categories": ordered }))
            .expect("report values are finite")
    }

    /// `category,confidence,precision,recall` rows for plotting.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("category,confidence,precision,recall\n");
        for (name, r) in self.entries() {
            for p in &r.curve.points {
                out.push_str(&format!("{name},{},{},{}\n", p.confidence, p.precision, p.recall));
            }
        }
        out
    }
}

struct Scored {
    confidence: f64,
    x_min: f64,
    frame: usize,
    det: usize,
    hit: bool,
}

fn curve_for(
    frames: &[EvalFrame],
    gt_ignore: impl Fn(&BBox) -> bool + Sync,
    det_ignore: impl Fn(&BBox) -> bool + Sync,
    iou_threshold: f64,
) -> PrCurve {
    let per_frame: Vec<(Vec<Scored>, usize)> = frames
        .par_iter()
        .enumerate()
        .map(|(f, frame)| {
            let gi: Vec<bool> = frame.ground_truth.iter().map(&gt_ignore).collect();
            let di: Vec<bool> = frame.detections.iter().map(|d| det_ignore(&d.bbox)).collect();
            let m = match_with_ignore(&frame.detections, &frame.ground_truth, &gi, &di, iou_threshold);
            let scored = m
                .outcomes
                .iter()
                .enumerate()
                .filter(|(_, o)| **o != Outcome::Ignored)
                .map(|(d, o)| Scored {
                    confidence: frame.detections[d].confidence(),
                    x_min: frame.detections[d].bbox.x_min(),
                    frame: f,
                    det: d,
                    hit: matches!(o, Outcome::TruePositive(_)),
                })
                .collect();
            (scored, gi.iter().filter(|i| !**i).count())
        })
        .collect();

    let num_gt = per_frame.iter().map(|(_, n)| n).sum();
    let mut all: Vec<Scored> = per_frame.into_iter().flat_map(|(s, _)| s).collect();
    all.sort_by(|a, b| {
        b.confidence
            .total_cmp(&a.confidence)
            .then(a.x_min.total_cmp(&b.x_min))
            .then(a.frame.cmp(&b.frame))
            .then(a.det.cmp(&b.det))
    });
    let ranked: Vec<(f64, bool)> = all.iter().map(|s| (s.confidence, s.hit)).collect();
    PrCurve::from_ranked(&ranked, num_gt)
}

/// Unstratified evaluation over a set of images.
pub fn evaluate(frames: &[EvalFrame], iou_threshold: f64) -> CategoryResult {
    CategoryResult::from_curve(curve_for(frames, |_| false, |_| false, iou_threshold))
}

/// Evaluation per size category plus overall.
///
/// For one category, ground truth of other sizes is ignored: a detection
/// matching it is neither a true nor a false positive. An unmatched
/// detection whose own size lies outside the category is ignored as well.
pub fn size_stratified_report(
    frames: &[EvalFrame],
    image_dims: (u32, u32),
    iou_threshold: f64,
) -> SizeReport {
    let per = |c: SizeCategory| {
        CategoryResult::from_curve(curve_for(
            frames,
            |b| classify_size(b, image_dims) != c,
            |b| classify_size(b, image_dims) != c,
            iou_threshold,
        ))
    };
    SizeReport {
        small: per(SizeCategory::Small),
        medium: per(SizeCategory::Medium),
        large: per(SizeCategory::Large),
        all: evaluate(frames, iou_threshold),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluation::EVAL_IOU;
    use crate::labeling::{ObjectClass, Source};

    fn bx(b: [f64; 4]) -> BBox {
        BBox::try_from(b).unwrap()
    }

    fn perfect(gts: &[BBox]) -> EvalFrame {
        EvalFrame {
            detections: gts.iter().map(|b| Detection::certain(*b, ObjectClass::Vehicle, Source::Wide)).collect(),
            ground_truth: gts.to_vec(),
        }
    }

    #[test]
    fn all_large_perfect() {
        let frames = vec![perfect(&[bx([0.0, 0.0, 200.0, 100.0]), bx([300.0, 50.0, 500.0, 200.0])])];
        let r = size_stratified_report(&frames, (640, 256), EVAL_IOU);
        assert_eq!(r.large.ap, Some(1.0));
        assert_eq!(r.all.ap, Some(1.0));
        assert_eq!(r.small.ap, None);
        assert_eq!(r.medium.ap, None);
    }

    #[test]
    fn all_false_positives_score_zero() {
        let gts = vec![bx([0.0, 0.0, 10.0, 10.0]), bx([100.0, 0.0, 150.0, 40.0]), bx([300.0, 0.0, 500.0, 200.0])];
        let dets = gts
            .iter()
            .map(|b| Detection::certain(b.map_affine(1.0, 1.0, 0.0, 220.0).clip(&BBox::from_size(640.0, 256.0)), ObjectClass::Vehicle, Source::Wide))
            .collect();
        let frames = vec![EvalFrame { detections: dets, ground_truth: gts }];
        let r = size_stratified_report(&frames, (640, 256), EVAL_IOU);
        for (_, c) in r.entries() {
            assert_eq!(c.ap, Some(0.0));
        }
    }

    #[test]
    fn cross_size_match_is_ignored() {
        // a medium detection on a small ground-truth box: IoU above 0.5
        let gt = bx([0.0, 0.0, 20.0, 20.0]);
        let det = Detection::certain(bx([0.0, 0.0, 21.0, 21.0]), ObjectClass::Vehicle, Source::Wide);
        let frames = vec![EvalFrame { detections: vec![det], ground_truth: vec![gt] }];
        let r = size_stratified_report(&frames, (640, 256), EVAL_IOU);
        assert_eq!(r.small.ap, Some(1.0));
        assert_eq!(r.medium.ap, None);
        assert_eq!(r.medium.curve.false_positives, 0);
    }

    #[test]
    fn empty_ground_truth_is_absent_everywhere() {
        let frames = vec![EvalFrame::default()];
        let r = size_stratified_report(&frames, (640, 256), EVAL_IOU);
        assert!(r.entries().iter().all(|(_, c)| c.ap.is_none()));
        assert!(r.to_json().contains("\"ap\": null"));
    }
}
