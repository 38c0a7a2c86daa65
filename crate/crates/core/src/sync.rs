//! Timestamp association between the camera and radar streams, frame
//! sub-sampling and ego-motion lookup.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::radar::EgoMotion;

/// Largest image/scan offset accepted when pairing, microseconds.
pub const DEFAULT_MAX_OFFSET_US: i64 = 10_000;
/// Keep one of every this many paired frames.
pub const DEFAULT_SUBSAMPLE: usize = 5;

/// Timestamps of one sensor stream, strictly increasing. Record offsets are
/// positions in the stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimedIndex {
    pub stream: String,
    timestamps_us: Vec<i64>,
}

impl TimedIndex {
    pub fn new(stream: impl Into<String>, timestamps_us: Vec<i64>) -> Result<Self> {
        if let Some(w) = timestamps_us.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::Invalid(format!(
                "timestamps must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        Ok(Self { stream: stream.into(), timestamps_us })
    }

    pub fn timestamps(&self) -> &[i64] {
        &self.timestamps_us
    }

    pub fn len(&self) -> usize {
        self.timestamps_us.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps_us.is_empty()
    }
}

/// An image record matched with a radar scan record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pair {
    pub image: usize,
    pub scan: usize,
    pub image_us: i64,
    pub scan_us: i64,
}

impl Pair {
    pub fn offset_us(&self) -> i64 {
        (self.image_us - self.scan_us).abs()
    }
}

/// Pairs each image, in time order, with the nearest scan not yet used,
/// provided it lies within `max_offset_us`. Equidistant scans resolve to the
/// earlier one. Images without a scan in range are dropped.
pub fn pair_streams(images: &TimedIndex, scans: &TimedIndex, max_offset_us: i64) -> Vec<Pair> {
    let ts = scans.timestamps();
    let mut used = vec![false; ts.len()];
    let mut out = Vec::new();
    for (image, &t) in images.timestamps().iter().enumerate() {
        let split = ts.partition_point(|&s| s < t);
        let before = (0..split).rev().find(|&j| !used[j]);
        let after = (split..ts.len()).find(|&j| !used[j]);
        let best = match (before, after) {
            (Some(b), Some(a)) => {
                if t - ts[b] <= ts[a] - t {
                    Some(b)
                } else {
                    Some(a)
                }
            }
            (b, a) => b.or(a),
        };
        if let Some(scan) = best {
            if (t - ts[scan]).abs() <= max_offset_us {
                used[scan] = true;
                out.push(Pair { image, scan, image_us: t, scan_us: ts[scan] });
            }
        }
    }
    out
}

/// Keeps every `factor`-th element, starting with the first.
pub fn subsample<T: Clone>(pairs: &[T], factor: usize) -> Result<Vec<T>> {
    if factor == 0 {
        return Err(Error::Config("sub-sampling factor must be at least 1".into()));
    }
    Ok(pairs.iter().step_by(factor).cloned().collect())
}

/// The ego-motion estimate closest in time to a scan; ties go to the earlier
/// estimate.
pub fn nearest_ego(scan_timestamp_us: i64, track: &[EgoMotion]) -> Result<EgoMotion> {
    track
        .iter()
        .enumerate()
        .min_by_key(|(i, e)| ((e.timestamp_us - scan_timestamp_us).abs(), e.timestamp_us, *i))
        .map(|(_, e)| *e)
        .ok_or(Error::Empty("ego-motion track"))
}
