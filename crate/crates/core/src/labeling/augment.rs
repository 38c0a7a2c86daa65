//! Label-space versions of the training augmentations: horizontal flip and
//! crop-then-resize.

use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::BBox;

/// Smallest crop side, as a fraction of the full image side.
pub const MIN_CROP_FRACTION: f64 = 0.6;

/// Mirrors boxes about the vertical centre line of an image `width` wide.
pub fn flip_boxes(boxes: &[BBox], width: f64) -> Vec<BBox> {
    boxes
        .iter()
        .map(|b| BBox::new(width - b.x_max(), b.y_min(), width - b.x_min(), b.y_max()).unwrap_or(*b))
        .collect()
}

/// Expresses boxes in the frame of `crop` resized to `out_size`, clipping
/// to the output image and dropping boxes left with zero area.
pub fn crop_resize_boxes(
    boxes: &[BBox],
    crop: &BBox,
    image_size: (f64, f64),
    out_size: (f64, f64),
) -> Result<Vec<BBox>> {
    let (w, h) = image_size;
    if !BBox::from_size(w, h).contains(crop) {
        return Err(Error::Config(format!("crop {crop:?} is outside the {w}x{h} image")));
    }
    let (fx, fy) = (crop.width() / w, crop.height() / h);
    let ok = |f: f64| (MIN_CROP_FRACTION - 1e-9..=1.0 + 1e-9).contains(&f);
    if !ok(fx) || !ok(fy) {
        return Err(Error::Config(format!(
            "crop covers {fx:.3} x {fy:.3} of the image; each side must be within [{MIN_CROP_FRACTION}, 1]"
        )));
    }
    let (sx, sy) = (out_size.0 / crop.width(), out_size.1 / crop.height());
    let out_bounds = BBox::from_size(out_size.0, out_size.1);
    Ok(boxes
        .iter()
        .map(|b| b.map_affine(sx, sy, -sx * crop.x_min(), -sy * crop.y_min()).clip(&out_bounds))
        .filter(|b| b.area() > 0.0)
        .collect())
}

/// One sampled augmentation: flip with probability 0.5, then with
/// probability 0.5 a crop covering 0.6–1.0 of each side, resized back to
/// the full image size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Augmentation {
    pub flip: bool,
    pub crop: Option<BBox>,
}

impl Augmentation {
    pub fn sample<R: Rng + ?Sized>(rng: &mut R, image_size: (f64, f64)) -> Self {
        let (w, h) = image_size;
        let flip = rng.random_bool(0.5);
        let crop = rng.random_bool(0.5).then(|| {
            let cw = w * rng.random_range(MIN_CROP_FRACTION..=1.0);
            let ch = h * rng.random_range(MIN_CROP_FRACTION..=1.0);
            let x0 = rng.random_range(0.0..=(w - cw));
            let y0 = rng.random_range(0.0..=(h - ch));
            BBox::new(x0, y0, (x0 + cw).min(w), (y0 + ch).min(h)).unwrap_or(BBox::from_size(w, h))
        });
        Self { flip, crop }
    }

    pub fn apply(&self, boxes: &[BBox], image_size: (f64, f64)) -> Result<Vec<BBox>> {
        let flipped;
        let boxes = if self.flip {
            flipped = flip_boxes(boxes, image_size.0);
            &flipped[..]
        } else {
            boxes
        };
        match &self.crop {
            Some(crop) => crop_resize_boxes(boxes, crop, image_size, image_size),
            None => Ok(boxes.to_vec()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bx(a: f64, b: f64, c: f64, d: f64) -> BBox {
        BBox::new(a, b, c, d).unwrap()
    }

    #[test]
    fn flip_examples() {
        assert_eq!(flip_boxes(&[bx(0.0, 0.0, 10.0, 10.0)], 640.0), vec![bx(630.0, 0.0, 640.0, 10.0)]);
        let centred = bx(300.0, 5.0, 340.0, 50.0);
        assert_eq!(flip_boxes(&[centred], 640.0), vec![centred]);
        let b = vec![bx(12.5, 1.0, 99.0, 7.0)];
        assert_eq!(flip_boxes(&flip_boxes(&b, 640.0), 640.0), b);
    }

    #[test]
    fn crop_examples() {
        let b = vec![bx(100.0, 100.0, 200.0, 200.0)];
        let full = BBox::from_size(800.0, 400.0);
        assert_eq!(crop_resize_boxes(&b, &full, (800.0, 400.0), (800.0, 400.0)).unwrap(), b);

        let crop = bx(100.0, 100.0, 740.0, 356.0);
        let out = crop_resize_boxes(&b, &crop, (800.0, 400.0), (640.0, 256.0)).unwrap();
        assert_eq!(out, vec![bx(0.0, 0.0, 100.0, 100.0)]);

        let right_half = bx(320.0, 0.0, 800.0, 400.0);
        let left = vec![bx(10.0, 10.0, 50.0, 50.0)];
        assert!(crop_resize_boxes(&left, &right_half, (800.0, 400.0), (800.0, 400.0))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn crop_fraction_is_checked() {
        let small = bx(0.0, 0.0, 100.0, 100.0);
        assert!(matches!(
            crop_resize_boxes(&[], &small, (640.0, 256.0), (640.0, 256.0)),
            Err(Error::Config(_))
        ));
        let outside = bx(100.0, 0.0, 800.0, 256.0);
        assert!(crop_resize_boxes(&[], &outside, (640.0, 256.0), (640.0, 256.0)).is_err());
    }

    #[test]
    fn sampled_crops_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let boxes = vec![bx(10.0, 10.0, 630.0, 250.0)];
        let mut crops = 0;
        for _ in 0..500 {
            let aug = Augmentation::sample(&mut rng, (640.0, 256.0));
            crops += usize::from(aug.crop.is_some());
            let out = aug.apply(&boxes, (640.0, 256.0)).unwrap();
            assert!(out.iter().all(|b| BBox::from_size(640.0, 256.0).contains(b)));
        }
        assert!((200..300).contains(&crops));
    }
}
