use serde::{Deserialize, Serialize};

/// Precision and recall after admitting every detection down to `confidence`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrPoint {
    pub confidence: f64,
    pub precision: f64,
    pub recall: f64,
}

/// Precision/recall trace over ranked detections plus final counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrCurve {
    /// One point per scored detection, by descending confidence.
    pub points: Vec<PrPoint>,
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub num_ground_truth: usize,
}

impl PrCurve {
    /// Builds the curve from `(confidence, is_true_positive)` pairs already in
    /// rank order.
    pub fn from_ranked(ranked: &[(f64, bool)], num_ground_truth: usize) -> Self {
        let (mut tp, mut fp) = (0usize, 0usize);
        let mut points = Vec::with_capacity(ranked.len());
        for &(confidence, hit) in ranked {
            if hit {
                tp += 1;
            } else {
                fp += 1;
            }
            let recall = if num_ground_truth == 0 { 0.0 } else { tp as f64 / num_ground_truth as f64 };
            points.push(PrPoint { confidence, precision: tp as f64 / (tp + fp) as f64, recall });
        }
        Self {
            points,
            true_positives: tp,
            false_positives: fp,
            false_negatives: num_ground_truth.saturating_sub(tp),
            num_ground_truth,
        }
    }

    /// Interpolated precision `max_{r' ≥ r} p(r')` at every point.
    pub fn envelope(&self) -> Vec<f64> {
        let mut env = vec![0.0; self.points.len()];
        let mut running = 0.0f64;
        for (e, p) in env.iter_mut().zip(&self.points).rev() {
            running = running.max(p.precision);
            *e = running;
        }
        env
    }
}

/// Area under the interpolated precision envelope (every-point
/// interpolation over recall). `None` when there is no ground truth.
pub fn average_precision(curve: &PrCurve) -> Option<f64> {
    if curve.num_ground_truth == 0 {
        return None;
    }
    let env = curve.envelope();
    let mut ap = 0.0;
    let mut prev_recall = 0.0;
    for (p, e) in curve.points.iter().zip(env) {
        if p.recall > prev_recall {
            ap += (p.recall - prev_recall) * e;
            prev_recall = p.recall;
        }
    }
    Some(ap)
}
