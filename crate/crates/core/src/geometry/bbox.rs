use serde::{Deserialize, Serialize};

use super::ImagePoint;
use crate::error::{Error, Result};

/// Axis-aligned box in continuous pixel coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct BBox {
    x_min: f64,
    y_min: f64,
    x_max: f64,
    y_max: f64,
}

impl BBox {
    pub fn new(x_min: f64, y_min: f64, x_max: f64, y_max: f64) -> Result<Self> {
        let finite = [x_min, y_min, x_max, y_max].iter().all(|v| v.is_finite());
        if !finite || x_min > x_max || y_min > y_max {
            return Err(Error::Invalid(format!(
                "box ({x_min}, {y_min}, {x_max}, {y_max}) is not ordered and finite"
            )));
        }
        Ok(Self { x_min, y_min, x_max, y_max })
    }

    /// `[0, width] × [0, height]`.
    pub fn from_size(width: f64, height: f64) -> Self {
        Self { x_min: 0.0, y_min: 0.0, x_max: width.max(0.0), y_max: height.max(0.0) }
    }

    /// Box from centre and size; negative sizes are treated as zero.
    pub fn from_center(cx: f64, cy: f64, w: f64, h: f64) -> Self {
        let (hw, hh) = (w.max(0.0) / 2.0, h.max(0.0) / 2.0);
        Self { x_min: cx - hw, y_min: cy - hh, x_max: cx + hw, y_max: cy + hh }
    }

    /// Smallest box containing every point.
    pub fn hull<I: IntoIterator<Item = ImagePoint>>(points: I) -> Result<Self> {
        let mut it = points.into_iter();
        let first = it.next().ok_or(Error::Empty("box hull points"))?;
        let init = (first.u, first.v, first.u, first.v);
        let (x0, y0, x1, y1) = it.fold(init, |(x0, y0, x1, y1), p| {
            (x0.min(p.u), y0.min(p.v), x1.max(p.u), y1.max(p.v))
        });
        Self::new(x0, y0, x1, y1)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }
    pub fn y_min(&self) -> f64 {
        self.y_min
    }
    pub fn x_max(&self) -> f64 {
        self.x_max
    }
    pub fn y_max(&self) -> f64 {
        self.y_max
    }
    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }
    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }
    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }
    pub fn center(&self) -> ImagePoint {
        ImagePoint::new((self.x_min + self.x_max) / 2.0, (self.y_min + self.y_max) / 2.0)
    }

    /// Corners in order top-left, top-right, bottom-right, bottom-left.
    pub fn corners(&self) -> [ImagePoint; 4] {
        [
            ImagePoint::new(self.x_min, self.y_min),
            ImagePoint::new(self.x_max, self.y_min),
            ImagePoint::new(self.x_max, self.y_max),
            ImagePoint::new(self.x_min, self.y_max),
        ]
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.x_min, self.y_min, self.x_max, self.y_max]
    }

    pub fn intersection(&self, other: &BBox) -> Option<BBox> {
        let x0 = self.x_min.max(other.x_min);
        let y0 = self.y_min.max(other.y_min);
        let x1 = self.x_max.min(other.x_max);
        let y1 = self.y_max.min(other.y_max);
        (x0 <= x1 && y0 <= y1).then_some(BBox { x_min: x0, y_min: y0, x_max: x1, y_max: y1 })
    }

    pub fn intersection_area(&self, other: &BBox) -> f64 {
        self.intersection(other).map_or(0.0, |b| b.area())
    }

    /// Intersection over union; 0 when the union has no area.
    pub fn iou(&self, other: &BBox) -> f64 {
        let inter = self.intersection_area(other);
        let union = self.area() + other.area() - inter;
        if union <= 0.0 {
            0.0
        } else {
            (inter / union).clamp(0.0, 1.0)
        }
    }

    /// Clamps every coordinate into `bounds`. A box entirely outside collapses
    /// onto the nearest edge with zero area.
    pub fn clip(&self, bounds: &BBox) -> BBox {
        let cx = |x: f64| x.clamp(bounds.x_min, bounds.x_max);
        let cy = |y: f64| y.clamp(bounds.y_min, bounds.y_max);
        BBox {
            x_min: cx(self.x_min),
            y_min: cy(self.y_min),
            x_max: cx(self.x_max),
            y_max: cy(self.y_max),
        }
    }

    pub fn contains_point(&self, p: &ImagePoint) -> bool {
        p.u >= self.x_min && p.u <= self.x_max && p.v >= self.y_min && p.v <= self.y_max
    }

    pub fn contains(&self, other: &BBox) -> bool {
        other.x_min >= self.x_min
            && other.y_min >= self.y_min
            && other.x_max <= self.x_max
            && other.y_max <= self.y_max
    }

    /// Largest absolute difference between corresponding edges.
    pub fn max_edge_difference(&self, other: &BBox) -> f64 {
        self.as_array()
            .iter()
            .zip(other.as_array())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Applies `x ↦ sx·x + tx`, `y ↦ sy·y + ty` with positive scales.
    pub fn map_affine(&self, sx: f64, sy: f64, tx: f64, ty: f64) -> BBox {
        BBox {
            x_min: sx * self.x_min + tx,
            y_min: sy * self.y_min + ty,
            x_max: sx * self.x_max + tx,
            y_max: sy * self.y_max + ty,
        }
    }
}

impl TryFrom<[f64; 4]> for BBox {
    type Error = Error;

    fn try_from(v: [f64; 4]) -> Result<Self> {
        BBox::new(v[0], v[1], v[2], v[3])
    }
}

impl From<BBox> for [f64; 4] {
    fn from(b: BBox) -> Self {
        b.as_array()
    }
}
