use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Pixel value of empty image locations in both radar channels.
pub const BACKGROUND: u8 = 0;

/// Mapping from radar measurements to 8-bit pixel values.
///
/// Range maps linearly from `[0, max_range_m]` onto `[1, 255]`; range rate
/// maps to `rate_null + rate_scale · rr`. Both clamp at the ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RadarEncoding {
    pub max_range_m: f64,
    /// Pixel values per m/s.
    pub rate_scale: f64,
    /// Pixel value of zero range rate.
    pub rate_null: u8,
}

impl Default for RadarEncoding {
    fn default() -> Self {
        Self { max_range_m: 100.0, rate_scale: 5.0, rate_null: 127 }
    }
}

impl RadarEncoding {
    pub fn validate(&self) -> Result<()> {
        if !(self.max_range_m > 0.0 && self.max_range_m.is_finite()) {
            return Err(Error::Config(format!("max range must be positive, got {}", self.max_range_m)));
        }
        if !(self.rate_scale > 0.0 && self.rate_scale.is_finite()) {
            return Err(Error::Config(format!("rate scale must be positive, got {}", self.rate_scale)));
        }
        Ok(())
    }

    pub fn range(&self, range_m: f64) -> Result<u8> {
        if !(range_m >= 0.0) {
            return Err(Error::Domain(format!("range must be non-negative, got {range_m}")));
        }
        let v = 1.0 + 254.0 * (range_m / self.max_range_m);
        Ok(v.round().min(255.0) as u8)
    }

    pub fn range_rate(&self, rr_mps: f64) -> u8 {
        let v = f64::from(self.rate_null) + self.rate_scale * rr_mps;
        // NaN clamps to the null value rather than to 0
        if v.is_nan() {
            return self.rate_null;
        }
        v.round().clamp(0.0, 255.0) as u8
    }

    /// Inverse of [`Self::range`]; `None` for background.
    pub fn decode_range(&self, px: u8) -> Option<f64> {
        (px != BACKGROUND).then(|| (f64::from(px) - 1.0) / 254.0 * self.max_range_m)
    }

    pub fn decode_range_rate(&self, px: u8) -> f64 {
        (f64::from(px) - f64::from(self.rate_null)) / self.rate_scale
    }

    /// Width of one range quantization step, metres.
    pub fn range_step(&self) -> f64 {
        self.max_range_m / 254.0
    }

    /// Width of one range-rate quantization step, m/s.
    pub fn rate_step(&self) -> f64 {
        1.0 / self.rate_scale
    }
}

/// [`RadarEncoding::range`] with the default mapping.
pub fn encode_range(range_m: f64) -> Result<u8> {
    RadarEncoding::default().range(range_m)
}

/// [`RadarEncoding::range_rate`] with the default mapping.
pub fn encode_range_rate(rr_mps: f64) -> u8 {
    RadarEncoding::default().range_rate(rr_mps)
}
