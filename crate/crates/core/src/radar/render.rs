use serde::{Deserialize, Serialize};

use super::{compensate_ego_motion, project_target, EgoMotion, RadarEncoding, RadarScan, BACKGROUND};
use crate::calibration::Calibration;
use crate::error::{Error, Result};
use crate::geometry::CameraModel;

/// Single-channel 8-bit image, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    pub width: u32,
    pub height: u32,
    pub data: Vec<u8>,
}

impl GrayImage {
    pub fn filled(width: u32, height: u32, value: u8) -> Self {
        Self { width, height, data: vec![value; width as usize * height as usize] }
    }

    pub fn get(&self, x: u32, y: u32) -> u8 {
        self.data[y as usize * self.width as usize + x as usize]
    }

    fn index(&self, x: i64, y: i64) -> Option<usize> {
        let inside = x >= 0 && y >= 0 && x < i64::from(self.width) && y < i64::from(self.height);
        inside.then(|| y as usize * self.width as usize + x as usize)
    }

    /// Binary PGM (`P5`, maxval 255).
    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.data);
        out
    }

    pub fn from_pgm(bytes: &[u8]) -> Result<Self> {
        let bad = |m: &str| Error::Invalid(format!("malformed PGM: {m}"));
        let mut pos = 0;
        let mut fields = Vec::with_capacity(4);
        while fields.len() < 4 {
            while pos < bytes.len() && (bytes[pos].is_ascii_whitespace() || bytes[pos] == b'#') {
                if bytes[pos] == b'#' {
                    while pos < bytes.len() && bytes[pos] != b'\n' {
                        pos += 1;
                    }
                } else {
                    pos += 1;
                }
            }
            let start = pos;
            while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if start == pos {
                return Err(bad("truncated header"));
            }
            fields.push(std::str::from_utf8(&bytes[start..pos]).map_err(|_| bad("header"))?);
        }
        if fields[0] != "P5" {
            return Err(bad("not a binary greymap"));
        }
        let num = |s: &str| s.parse::<u32>().map_err(|_| bad("bad number"));
        let (width, height, maxval) = (num(fields[1])?, num(fields[2])?, num(fields[3])?);
        if maxval != 255 {
            return Err(bad("only 8-bit images are supported"));
        }
        // exactly one whitespace byte separates header and raster
        pos += 1;
        let n = width as usize * height as usize;
        let data = bytes.get(pos..pos + n).ok_or_else(|| bad("short raster"))?.to_vec();
        Ok(Self { width, height, data })
    }
}

/// The two radar image channels aligned with the wide camera.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RadarChannels {
    pub range: GrayImage,
    pub range_rate: GrayImage,
}

impl RadarChannels {
    pub fn background(width: u32, height: u32) -> Self {
        Self {
            range: GrayImage::filled(width, height, BACKGROUND),
            range_rate: GrayImage::filled(width, height, BACKGROUND),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RenderConfig {
    /// Radius of the disc drawn for each target, pixels.
    pub radius_px: u32,
    pub encoding: RadarEncoding,
}

impl Default for RenderConfig {
    fn default() -> Self {
        Self { radius_px: 2, encoding: RadarEncoding::default() }
    }
}

/// Draws every ego-compensated target of a scan as a filled disc in the
/// range and range-rate channels of the wide camera's image.
///
/// Pixels within `radius_px` (Euclidean, inclusive) of the rounded projected
/// position are painted. Where discs overlap the nearer target wins; equal
/// ranges keep the earlier target. Targets behind the camera or off the
/// image are dropped.
pub fn render_channels(
    scan: &RadarScan,
    ego: &EgoMotion,
    calib: &Calibration,
    config: &RenderConfig,
) -> Result<RadarChannels> {
    config.encoding.validate()?;
    let (w, h) = calib.wide.dims();
    let camera = CameraModel::at_origin(calib.wide);
    let mut out = RadarChannels::background(w, h);
    let mut depth = vec![f64::INFINITY; w as usize * h as usize];
    let r = i64::from(config.radius_px);

    for target in &scan.targets {
        let t = compensate_ego_motion(target, ego);
        let Ok(p) = project_target(&t, &calib.radar_to_wide, &camera) else {
            continue;
        };
        if !(p.u.is_finite() && p.v.is_finite()) {
            continue;
        }
        let range_px = config.encoding.range(t.range_m)?;
        let rate_px = config.encoding.range_rate(t.range_rate_mps);
        let (cx, cy) = (p.u.round() as i64, p.v.round() as i64);
        for dy in -r..=r {
            for dx in -r..=r {
                if dx * dx + dy * dy > r * r {
                    continue;
                }
                let Some(i) = out.range.index(cx + dx, cy + dy) else {
                    continue;
                };
                if t.range_m < depth[i] {
                    depth[i] = t.range_m;
                    out.range.data[i] = range_px;
                    out.range_rate.data[i] = rate_px;
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{CameraIntrinsics, RigidTransform, Rotation3};
    use crate::radar::{Beam, RadarTarget};

    fn calib() -> Calibration {
        Calibration {
            wide: CameraIntrinsics::new(625.0, 625.0, 320.0, 128.0, 640, 256).unwrap(),
            narrow: CameraIntrinsics::new(2500.0, 2500.0, 640.0, 480.0, 1280, 960).unwrap(),
            rotation_wide_from_narrow: Rotation3::identity(),
            separation_m: 0.032,
            radar_to_wide: RigidTransform::identity(),
        }
    }

    fn target(range: f64, bearing: f64, rr: f64) -> RadarTarget {
        RadarTarget {
            range_m: range,
            bearing_rad: bearing,
            range_rate_mps: rr,
            amplitude_db: 0.0,
            beam: Beam::LongNarrow,
            timestamp_us: 0,
        }
    }

    fn painted(img: &GrayImage) -> usize {
        img.data.iter().filter(|v| **v != BACKGROUND).count()
    }

    #[test]
    fn empty_scan_is_background() {
        let ch = render_channels(&RadarScan::empty(0), &EgoMotion::stationary(0), &calib(), &RenderConfig::default())
            .unwrap();
        assert_eq!(ch, RadarChannels::background(640, 256));
    }

    #[test]
    fn boresight_target_draws_thirteen_pixels() {
        // lattice points with dx² + dy² <= 4: 1 + 4 (axis, 1) + 4 (axis, 2) + 4 (diagonal) = 13
        let brute = (-2i32..=2)
            .flat_map(|dy| (-2i32..=2).map(move |dx| dx * dx + dy * dy))
            .filter(|d| *d <= 4)
            .count();
        assert_eq!(brute, 13);

        let scan = RadarScan::new(0, vec![target(10.0, 0.0, 0.0)]).unwrap();
        let ch = render_channels(&scan, &EgoMotion::stationary(0), &calib(), &RenderConfig::default())
            .unwrap();
        assert_eq!(painted(&ch.range), 13);
        assert_eq!(painted(&ch.range_rate), 13);
        assert_eq!(ch.range_rate.get(320, 128), 127);
        assert_eq!(ch.range_rate.get(322, 128), 127);
        assert_eq!(ch.range_rate.get(322, 129), BACKGROUND);
        assert_eq!(ch.range.get(320, 128), encode_range_default(10.0));
    }

    fn encode_range_default(r: f64) -> u8 {
        crate::radar::encode_range(r).unwrap()
    }

    #[test]
    fn near_target_overwrites_far() {
        // 1 px apart at the image centre
        let far = target(50.0, (1.0f64 / 625.0).atan(), 5.0);
        let near = target(10.0, 0.0, -5.0);
        let cfg = RenderConfig::default();
        for order in [vec![far, near], vec![near, far]] {
            let scan = RadarScan::new(0, order).unwrap();
            let ch = render_channels(&scan, &EgoMotion::stationary(0), &calib(), &cfg).unwrap();
            assert_eq!(ch.range.get(320, 128), encode_range_default(10.0));
            assert_eq!(ch.range.get(321, 128), encode_range_default(10.0));
            // only the far disc reaches x = 323
            assert_eq!(ch.range.get(323, 128), encode_range_default(50.0));
            assert_eq!(ch.range_rate.get(321, 128), cfg.encoding.range_rate(-5.0));
        }
    }

    #[test]
    fn ego_motion_is_removed_before_encoding() {
        let scan = RadarScan::new(0, vec![target(30.0, 0.0, -12.0)]).unwrap();
        let ch = render_channels(&scan, &EgoMotion::forward(12.0, 0), &calib(), &RenderConfig::default())
            .unwrap();
        assert_eq!(ch.range_rate.get(320, 128), 127);
    }

    #[test]
    fn pgm_round_trip() {
        let mut img = GrayImage::filled(3, 2, 0);
        img.data = vec![0, 1, 2, 253, 254, 255];
        let bytes = img.to_pgm();
        assert!(bytes.starts_with(b"P5\n3 2\n255\n"));
        assert_eq!(GrayImage::from_pgm(&bytes).unwrap(), img);
        assert!(GrayImage::from_pgm(b"P2\n1 1\n255\n0").is_err());
        assert!(GrayImage::from_pgm(b"P5\n4 4\n255\n\x00").is_err());
    }
}
