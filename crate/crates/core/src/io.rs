//! Line-oriented file formats and atomic writes.
//!
//! Every format is newline-delimited JSON, one record per line, with fields
//! written in a fixed order. Blank lines are skipped. Parse errors carry the
//! 1-based line number.
//!
//! | file | record |
//! |------|--------|
//! | detections / ground truth | `frame_id, class, objectness, class_probs, x_min, y_min, x_max, y_max, source` |
//! | radar scans | `timestamp_us, beam, range_m, bearing_rad, range_rate_mps, amplitude_db` |
//! | ego track | `timestamp_us, velocity_mps, yaw_rate_rps` |
//! | timestamp index | `timestamp_us, path` |
//!
//! A detection line holding only `frame_id` declares a frame with no
//! objects; a radar line holding only `timestamp_us` declares an empty scan.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::BBox;
use crate::labeling::{Detection, ObjectClass, Source};
use crate::radar::{Beam, EgoMotion, RadarScan, RadarTarget};

/// Detections grouped by frame id.
pub type FrameDetections = BTreeMap<u64, Vec<Detection>>;

/// Writes `contents` to `path` through a temporary file in the same
/// directory followed by a rename, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir)?;
    let name = path
        .file_name()
        .ok_or_else(|| Error::Invalid(format!("{} has no file name", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    Ok(result?)
}

/// Parses one JSON value per non-blank line.
pub fn parse_ndjson<T: DeserializeOwned>(text: &str) -> Result<Vec<T>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| Error::Parse { line: i + 1, message: e.to_string() })
        })
        .collect()
}

pub fn to_ndjson<T: Serialize>(records: &[T]) -> Result<String> {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r)?);
        out.push('\n');
    }
    Ok(out)
}

/// On-disk form of a [`Detection`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionRecord {
    pub frame_id: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<ObjectClass>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objectness: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class_probs: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<Source>,
}

impl DetectionRecord {
    pub fn marker(frame_id: u64) -> Self {
        Self {
            frame_id,
            class: None,
            objectness: None,
            class_probs: None,
            x_min: None,
            y_min: None,
            x_max: None,
            y_max: None,
            source: None,
        }
    }

    pub fn from_detection(frame_id: u64, d: &Detection) -> Self {
        let [x0, y0, x1, y1] = d.bbox.as_array();
        Self {
            frame_id,
            class: Some(d.class),
            objectness: Some(d.objectness),
            class_probs: Some(d.class_probs.clone()),
            x_min: Some(x0),
            y_min: Some(y0),
            x_max: Some(x1),
            y_max: Some(y1),
            source: Some(d.source),
        }
    }

    /// `None` for a frame marker. Missing `objectness`, `class_probs` and
    /// `source` default to 1, one-hot and `wide`, which suits ground truth.
    pub fn to_detection(&self) -> Result<Option<Detection>> {
        let coords = [self.x_min, self.y_min, self.x_max, self.y_max];
        if coords.iter().all(Option::is_none) && self.class.is_none() {
            return Ok(None);
        }
        let [Some(x0), Some(y0), Some(x1), Some(y1)] = coords else {
            return Err(Error::Invalid("detection needs all of x_min, y_min, x_max, y_max".into()));
        };
        let class = self.class.unwrap_or(ObjectClass::Vehicle);
        let mut d = Detection::certain(BBox::new(x0, y0, x1, y1)?, class, self.source.unwrap_or(Source::Wide));
        if let Some(o) = self.objectness {
            d.objectness = o;
        }
        if let Some(p) = &self.class_probs {
            d.class_probs = p.clone();
        }
        d.validate()?;
        Ok(Some(d))
    }
}

pub fn parse_detections(text: &str) -> Result<FrameDetections> {
    let mut out = FrameDetections::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let at = |e: &dyn std::fmt::Display| Error::Parse { line: i + 1, message: e.to_string() };
        let rec: DetectionRecord = serde_json::from_str(line).map_err(|e| at(&e))?;
        let det = rec.to_detection().map_err(|e| at(&e))?;
        let frame = out.entry(rec.frame_id).or_default();
        frame.extend(det);
    }
    Ok(out)
}

/// Frames without detections are written as markers.
pub fn detections_to_ndjson(frames: &FrameDetections) -> Result<String> {
    let mut records = Vec::new();
    for (&id, dets) in frames {
        if dets.is_empty() {
            records.push(DetectionRecord::marker(id));
        }
        records.extend(dets.iter().map(|d| DetectionRecord::from_detection(id, d)));
    }
    to_ndjson(&records)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct RadarRecord {
    timestamp_us: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    beam: Option<Beam>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    range_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bearing_rad: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    range_rate_mps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    amplitude_db: Option<f64>,
}

/// Groups target lines into scans ordered by timestamp.
pub fn parse_scans(text: &str) -> Result<Vec<RadarScan>> {
    let mut scans: BTreeMap<i64, Vec<RadarTarget>> = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let at = |m: String| Error::Parse { line: i + 1, message: m };
        let r: RadarRecord = serde_json::from_str(line).map_err(|e| at(e.to_string()))?;
        let targets = scans.entry(r.timestamp_us).or_default();
        match (r.beam, r.range_m, r.bearing_rad, r.range_rate_mps) {
            (None, None, None, None) => {}
            (Some(beam), Some(range_m), Some(bearing_rad), Some(range_rate_mps)) => {
                let t = RadarTarget {
                    range_m,
                    bearing_rad,
                    range_rate_mps,
                    amplitude_db: r.amplitude_db.unwrap_or(0.0),
                    beam,
                    timestamp_us: r.timestamp_us,
                };
                t.validate().map_err(|e| at(e.to_string()))?;
                targets.push(t);
            }
            _ => return Err(at("target needs beam, range_m, bearing_rad and range_rate_mps".into())),
        }
    }
    scans.into_iter().map(|(t, targets)| RadarScan::new(t, targets)).collect()
}

/// Empty scans are written as markers.
pub fn scans_to_ndjson(scans: &[RadarScan]) -> Result<String> {
    let mut records = Vec::new();
    for s in scans {
        if s.targets.is_empty() {
            records.push(RadarRecord {
                timestamp_us: s.timestamp_us,
                beam: None,
                range_m: None,
                bearing_rad: None,
                range_rate_mps: None,
                amplitude_db: None,
            });
        }
        records.extend(s.targets.iter().map(|t| RadarRecord {
            timestamp_us: s.timestamp_us,
            beam: Some(t.beam),
            range_m: Some(t.range_m),
            bearing_rad: Some(t.bearing_rad),
            range_rate_mps: Some(t.range_rate_mps),
            amplitude_db: Some(t.amplitude_db),
        }));
    }
    to_ndjson(&records)
}

#[derive(Serialize, Deserialize)]
struct EgoRecord {
    timestamp_us: i64,
    #[serde(with = "crate::geometry::vec3_serde")]
    velocity_mps: nalgebra::Vector3<f64>,
    #[serde(default)]
    yaw_rate_rps: f64,
}

pub fn parse_ego_track(text: &str) -> Result<Vec<EgoMotion>> {
    let records: Vec<EgoRecord> = parse_ndjson(text)?;
    Ok(records
        .into_iter()
        .map(|r| EgoMotion { velocity_mps: r.velocity_mps, yaw_rate_rps: r.yaw_rate_rps, timestamp_us: r.timestamp_us })
        .collect())
}

pub fn ego_track_to_ndjson(track: &[EgoMotion]) -> Result<String> {
    let records: Vec<EgoRecord> = track
        .iter()
        .map(|e| EgoRecord { timestamp_us: e.timestamp_us, velocity_mps: e.velocity_mps, yaw_rate_rps: e.yaw_rate_rps })
        .collect();
    to_ndjson(&records)
}

/// One line of a timestamp index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexEntry {
    pub timestamp_us: i64,
    pub path: String,
}

pub fn parse_index(text: &str) -> Result<Vec<IndexEntry>> {
    parse_ndjson(text)
}

pub fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })
}
