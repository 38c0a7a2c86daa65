//! Single-shot detector loss terms: softmax cross-entropy with hard-negative
//! mining on the class scores and smooth L1 on the box offsets.

use super::{Assignment, DefaultBox, MatchAssignment};
use crate::geometry::BBox;

/// Negatives kept per positive by hard-negative mining.
pub const HARD_NEGATIVE_RATIO: usize = 3;
/// Centre and size variances used when encoding box offsets.
pub const OFFSET_VARIANCES: [f64; 2] = [0.1, 0.2];

/// Smooth L1 and its derivative.
pub fn smooth_l1(x: f64) -> (f64, f64) {
    if x.abs() < 1.0 {
        (0.5 * x * x, x)
    } else {
        (x.abs() - 0.5, x.signum())
    }
}

/// Cross-entropy of softmax(`logits`) against class `target`.
pub fn cross_entropy(logits: &[f64], target: usize) -> f64 {
    log_sum_exp(logits) - logits[target]
}

fn log_sum_exp(z: &[f64]) -> f64 {
    let m = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::INFINITY {
        return m;
    }
    m + z.iter().map(|v| (v - m).exp()).sum::<f64>().ln()
}

fn softmax(z: &[f64]) -> Vec<f64> {
    let lse = log_sum_exp(z);
    z.iter().map(|v| (v - lse).exp()).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationLoss {
    pub value: f64,
    /// d value / d logits, same shape as the input.
    pub gradient: Vec<Vec<f64>>,
    /// Negatives selected by hard-negative mining, ascending.
    pub selected_negatives: Vec<usize>,
}

/// Softmax cross-entropy over positives and mined negatives, divided by the
/// number of positives.
///
/// `logits[i]` holds the class scores of default box `i`, with index 0 the
/// background class. A box matched to ground truth `g` targets class
/// `gt_classes[g]`. Negatives are ranked by their background loss (ties to
/// the lower index) and the top `3 · positives` are kept. With no positives
/// the loss is 0.
pub fn classification_loss(
    logits: &[Vec<f64>],
    assignment: &MatchAssignment,
    gt_classes: &[usize],
) -> ClassificationLoss {
    let mut gradient: Vec<Vec<f64>> = logits.iter().map(|z| vec![0.0; z.len()]).collect();
    let positives = assignment.positives();
    if positives == 0 {
        return ClassificationLoss { value: 0.0, gradient, selected_negatives: Vec::new() };
    }

    let mut negatives: Vec<(usize, f64)> = assignment
        .0
        .iter()
        .enumerate()
        .filter(|(_, a)| **a == Assignment::Negative)
        .map(|(i, _)| (i, cross_entropy(&logits[i], 0)))
        .collect();
    negatives.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    negatives.truncate(HARD_NEGATIVE_RATIO * positives);
    let mut selected: Vec<usize> = negatives.iter().map(|(i, _)| *i).collect();
    selected.sort_unstable();

    let norm = positives as f64;
    let mut value = 0.0;
    let targets = assignment
        .0
        .iter()
        .enumerate()
        .filter_map(|(i, a)| match a {
            Assignment::Matched(g) => Some((i, gt_classes[*g])),
            Assignment::Negative => None,
        })
        .chain(selected.iter().map(|&i| (i, 0)));
    for (i, target) in targets {
        value += cross_entropy(&logits[i], target);
        let p = softmax(&logits[i]);
        for (k, (g, pk)) in gradient[i].iter_mut().zip(p).enumerate() {
            *g = (pk - if k == target { 1.0 } else { 0.0 }) / norm;
        }
    }
    ClassificationLoss { value: value / norm, gradient, selected_negatives: selected }
}

/// Regression targets of a ground-truth box relative to a default box, both
/// normalized: `((gx−dx)/(v₀·dw), (gy−dy)/(v₀·dh), ln(gw/dw)/v₁, ln(gh/dh)/v₁)`.
pub fn encode_offsets(gt: &BBox, default: &DefaultBox) -> [f64; 4] {
    let c = gt.center();
    let [v0, v1] = OFFSET_VARIANCES;
    [
        (c.u - default.cx) / (v0 * default.w),
        (c.v - default.cy) / (v0 * default.h),
        (gt.width() / default.w).ln() / v1,
        (gt.height() / default.h).ln() / v1,
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalizationLoss {
    pub value: f64,
    /// d value / d predicted offsets.
    pub gradient: Vec<[f64; 4]>,
}

/// Smooth L1 between predicted and encoded offsets over matched default
/// boxes, divided by the number of positives (0 with no positives).
pub fn localization_loss(
    predicted: &[[f64; 4]],
    defaults: &[DefaultBox],
    gts: &[BBox],
    assignment: &MatchAssignment,
) -> LocalizationLoss {
    let mut gradient = vec![[0.0; 4]; predicted.len()];
    let positives = assignment.positives();
    if positives == 0 {
        return LocalizationLoss { value: 0.0, gradient };
    }
    let norm = positives as f64;
    let mut value = 0.0;
    for (i, a) in assignment.0.iter().enumerate() {
        let Assignment::Matched(g) = a else { continue };
        let target = encode_offsets(&gts[*g], &defaults[i]);
        for k in 0..4 {
            let (v, d) = smooth_l1(predicted[i][k] - target[k]);
            value += v;
            gradient[i][k] = d / norm;
        }
    }
    LocalizationLoss { value: value / norm, gradient }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn smooth_l1_values() {
        assert_eq!(smooth_l1(0.0), (0.0, 0.0));
        assert_eq!(smooth_l1(0.5), (0.125, 0.5));
        assert_eq!(smooth_l1(1.0), (0.5, 1.0));
        assert_eq!(smooth_l1(2.0), (1.5, 1.0));
        assert_eq!(smooth_l1(-2.0), (1.5, -1.0));
    }

    #[test]
    fn smooth_l1_is_c1_at_one() {
        for s in [1.0, -1.0] {
            let below = smooth_l1(s * (1.0 - 1e-12));
            let at = smooth_l1(s);
            assert!((below.0 - at.0).abs() < 1e-11);
            assert!((below.1 - at.1).abs() < 1e-11);
        }
    }

    #[test]
    fn uniform_scores_cost_log_classes() {
        for c in [2usize, 3, 7] {
            assert_relative_eq!(cross_entropy(&vec![0.3; c], c - 1), (c as f64).ln(), epsilon = 1e-14);
        }
        let m = MatchAssignment(vec![Assignment::Matched(0), Assignment::Matched(0)]);
        let loss = classification_loss(&[vec![1.0; 3], vec![-2.0; 3]], &m, &[2]);
        assert_relative_eq!(loss.value, 3f64.ln(), epsilon = 1e-14);
    }

    #[test]
    fn confident_correct_scores_approach_zero() {
        let m = MatchAssignment(vec![Assignment::Matched(0), Assignment::Negative]);
        let mut prev = f64::INFINITY;
        for scale in [1.0, 10.0, 100.0] {
            let logits = vec![vec![0.0, scale], vec![scale, 0.0]];
            let loss = classification_loss(&logits, &m, &[1]).value;
            assert!(loss < prev);
            prev = loss;
        }
        assert!(prev < 1e-40);
    }

    #[test]
    fn no_positives_is_zero() {
        let m = MatchAssignment(vec![Assignment::Negative; 3]);
        let loss = classification_loss(&vec![vec![0.0, 1.0]; 3], &m, &[]);
        assert_eq!(loss.value, 0.0);
        assert!(loss.gradient.iter().flatten().all(|g| *g == 0.0));
    }

    #[test]
    fn hard_negatives_are_capped() {
        let mut a = vec![Assignment::Negative; 10];
        a[0] = Assignment::Matched(0);
        let logits: Vec<Vec<f64>> = (0..10).map(|i| vec![0.0, i as f64 * 0.1]).collect();
        let loss = classification_loss(&logits, &MatchAssignment(a), &[1]);
        // the three negatives with the largest foreground score
        assert_eq!(loss.selected_negatives, vec![7, 8, 9]);
    }

    #[test]
    fn perfect_offsets_have_zero_loss() {
        let d = DefaultBox { cx: 0.5, cy: 0.5, w: 0.2, h: 0.1, scale_index: 0, aspect_index: 0, subdivision_index: 0 };
        let gt = BBox::new(0.45, 0.42, 0.6, 0.55).unwrap();
        let t = encode_offsets(&gt, &d);
        let m = MatchAssignment(vec![Assignment::Matched(0)]);
        let loss = localization_loss(&[t], &[d], &[gt], &m);
        assert!(loss.value.abs() < 1e-15);
    }
}
