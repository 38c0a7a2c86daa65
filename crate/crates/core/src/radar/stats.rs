use serde::{Deserialize, Serialize};

use super::RadarChannels;
use crate::error::{Error, Result};

/// Mean and population standard deviation of one channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

impl MeanStd {
    /// Exact statistics over every pixel of every image.
    ///
    /// Sums are accumulated in integers, so the only rounding happens in the
    /// final divisions and square root.
    pub fn of_pixels<'a, I: IntoIterator<Item = &'a [u8]>>(images: I) -> Result<Self> {
        let (mut n, mut sum, mut sum_sq) = (0u128, 0u128, 0u128);
        for img in images {
            n += img.len() as u128;
            for &v in img {
                sum += u128::from(v);
                sum_sq += u128::from(v) * u128::from(v);
            }
        }
        if n == 0 {
            return Err(Error::Empty("channel statistics need at least one pixel"));
        }
        // n²·var = n·Σx² − (Σx)², exact in integers
        let scaled_var = n * sum_sq - sum * sum;
        let nf = n as f64;
        Ok(Self { mean: sum as f64 / nf, std: (scaled_var as f64).sqrt() / nf })
    }

    /// `(v − mean) / std`, or `v − mean` for a constant channel.
    pub fn normalize(&self, v: f64) -> f64 {
        if self.std > 0.0 {
            (v - self.mean) / self.std
        } else {
            v - self.mean
        }
    }
}

/// Per-channel statistics of a set of radar channel images.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelStats {
    pub range: MeanStd,
    pub range_rate: MeanStd,
}

/// Dataset mean and population standard deviation of each radar channel,
/// used to put the modalities on a common scale.
pub fn channel_stats(dataset: &[RadarChannels]) -> Result<ChannelStats> {
    if dataset.is_empty() {
        return Err(Error::Empty("channel statistics need at least one image"));
    }
    Ok(ChannelStats {
        range: MeanStd::of_pixels(dataset.iter().map(|c| c.range.data.as_slice()))?,
        range_rate: MeanStd::of_pixels(dataset.iter().map(|c| c.range_rate.data.as_slice()))?,
    })
}
