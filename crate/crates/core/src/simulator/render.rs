use nalgebra::{Vector2, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::rig::SensorRig;
use super::scene::{Scene, Vehicle};
use crate::error::Result;
use crate::geometry::{project, BBox, CameraModel, ImagePoint};
use crate::radar::{Beam, BeamSpec, EgoMotion, RadarScan, RadarTarget, MAX_TARGETS_PER_BEAM};

/// Corners closer than this to the image plane make a vehicle invisible.
pub const MIN_DEPTH_M: f64 = 0.5;

/// Random-stream purposes for [`frame_rng`].
pub const STREAM_RADAR: u64 = 0;
pub const STREAM_WIDE_DETECTOR: u64 = 1;
pub const STREAM_NARROW_DETECTOR: u64 = 2;
pub const STREAM_AUGMENT: u64 = 3;

/// Independent, reproducible generator for one sample and one purpose.
///
/// Streams depend only on `(seed, index, purpose)`, so results do not change
/// with evaluation order or thread count.
pub fn frame_rng(seed: u64, index: u64, purpose: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index.wrapping_shl(2) | (purpose & 3));
    rng
}

/// Ground-truth box of one vehicle in one camera.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GtBox {
    pub vehicle: usize,
    /// Clipped to the image.
    pub bbox: BBox,
    /// Hull of the projected corners before clipping.
    pub unclipped: BBox,
    /// Smallest corner depth in the camera frame, metres.
    pub z_near_m: f64,
}

/// Ground truth of one image pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CameraFrame {
    pub timestamp_us: i64,
    pub wide: Vec<GtBox>,
    pub narrow: Vec<GtBox>,
}

impl CameraFrame {
    pub fn wide_boxes(&self) -> Vec<BBox> {
        self.wide.iter().map(|g| g.bbox).collect()
    }

    pub fn narrow_boxes(&self) -> Vec<BBox> {
        self.narrow.iter().map(|g| g.bbox).collect()
    }
}

/// What produced a simulated radar target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetOrigin {
    Vehicle(usize),
    Structure(usize),
    Clutter,
}

/// A scan plus the origin of every target, index-aligned.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulatedScan {
    pub scan: RadarScan,
    pub origins: Vec<TargetOrigin>,
}

/// Everything observable at a single instant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameTruth {
    pub camera: CameraFrame,
    pub radar: SimulatedScan,
    pub ego: EgoMotion,
}

/// A complete simulated drive on the sensors' own clocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulatedRun {
    /// The scene with traffic expanded into explicit vehicles.
    pub scene: Scene,
    pub rig: SensorRig,
    pub frames: Vec<CameraFrame>,
    pub scans: Vec<SimulatedScan>,
    /// Ego-motion estimates at the camera timestamps.
    pub ego_track: Vec<EgoMotion>,
}

fn seconds(t_us: i64) -> f64 {
    t_us as f64 * 1e-6
}

/// Projects every visible vehicle into `camera`.
///
/// A vehicle is visible when all its corners lie at least [`MIN_DEPTH_M`] in
/// front of the camera and its clipped box has positive area.
pub fn camera_boxes(camera: &CameraModel, vehicles: &[Vehicle], t_s: f64, ground_y: f64) -> Vec<GtBox> {
    let bounds = camera.intrinsics.bounds();
    let mut out = Vec::new();
    for (i, v) in vehicles.iter().enumerate() {
        let corners = v.corners_at(t_s, ground_y).map(|c| camera.to_camera(&c));
        let z_near = corners.iter().map(|c| c.z).fold(f64::INFINITY, f64::min);
        if z_near < MIN_DEPTH_M {
            continue;
        }
        let pts = corners.map(|c| camera.intrinsics.project_ray(&c));
        let Ok(unclipped) = BBox::hull(pts) else { continue };
        let bbox = unclipped.clip(&bounds);
        if bbox.area() > 0.0 {
            out.push(GtBox { vehicle: i, bbox, unclipped, z_near_m: z_near });
        }
    }
    out
}

/// Ground truth for both cameras at `t_us`.
pub fn camera_frame(scene: &Scene, rig: &SensorRig, t_us: i64) -> CameraFrame {
    let t = seconds(t_us);
    let ego = scene.ego_position(t);
    let ground = scene.camera_height_m;
    CameraFrame {
        timestamp_us: t_us,
        wide: camera_boxes(&rig.wide_camera(&ego), &scene.vehicles, t, ground),
        narrow: camera_boxes(&rig.narrow_camera(&ego), &scene.vehicles, t, ground),
    }
}

/// Exact platform velocity at `t_us`, expressed in the radar frame.
pub fn ego_motion(scene: &Scene, rig: &SensorRig, t_us: i64) -> EgoMotion {
    let to_radar = rig.radar_to_wide.rotation.transpose();
    EgoMotion {
        velocity_mps: to_radar.apply(&scene.ego_velocity()),
        yaw_rate_rps: 0.0,
        timestamp_us: t_us,
    }
}

/// Closest point of a convex polygon (given in order) to the origin.
fn nearest_on_polygon(poly: &[Vector2<f64>]) -> Option<Vector2<f64>> {
    let n = poly.len();
    let mut inside_sign = 0.0f64;
    let mut inside = true;
    let mut best: Option<Vector2<f64>> = None;
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        let e = b - a;
        let cross = e.x * (-a.y) - e.y * (-a.x);
        if inside_sign == 0.0 {
            inside_sign = cross.signum();
        } else if cross.signum() != inside_sign {
            inside = false;
        }
        let t = if e.norm_squared() > 0.0 { (-a.dot(&e) / e.norm_squared()).clamp(0.0, 1.0) } else { 0.0 };
        let p = a + e * t;
        if best.is_none_or(|q| p.norm() < q.norm()) {
            best = Some(p);
        }
    }
    (!inside).then_some(best).flatten()
}

struct Echo {
    /// `(x, z)` in the radar frame.
    point: Vector2<f64>,
    /// Relative velocity `(x, z)` in the radar frame.
    velocity: Vector2<f64>,
    rcs_m2: f64,
    origin: TargetOrigin,
}

fn beam_spec(rig: &SensorRig, beam: Beam) -> BeamSpec {
    match beam {
        Beam::MediumWide => rig.medium_beam,
        Beam::LongNarrow => rig.long_beam,
    }
}

/// Simulated radar scan at `t_us`.
///
/// Each vehicle returns its footprint point nearest the radar, each
/// structure returns itself, and clutter is scattered uniformly over the
/// beams. Targets are reported in every beam that covers them, nearest first,
/// at most [`MAX_TARGETS_PER_BEAM`] per beam.
pub fn radar_scan(scene: &Scene, rig: &SensorRig, t_us: i64, rng: &mut ChaCha8Rng) -> Result<SimulatedScan> {
    let t = seconds(t_us);
    let ego = scene.ego_position(t);
    let to_radar = rig.world_to_radar(&ego);
    let radar_y = to_radar.inverse().translation.y;
    let rot = to_radar.rotation;
    let rel = |v: Vector3<f64>| {
        let r = rot.apply(&(v - scene.ego_velocity()));
        Vector2::new(r.x, r.z)
    };
    let flat = |p: Vector3<f64>| {
        let r = to_radar.apply(&p);
        Vector2::new(r.x, r.z)
    };

    let mut echoes = Vec::new();
    for (i, v) in scene.vehicles.iter().enumerate() {
        let ground = scene.camera_height_m;
        if radar_y < ground - v.height_m || radar_y > ground {
            continue;
        }
        let [cx, cz] = v.centre_at(t);
        let (hw, hl) = (v.width_m / 2.0, v.length_m / 2.0);
        let footprint = [(-hw, -hl), (hw, -hl), (hw, hl), (-hw, hl)]
            .map(|(dx, dz)| flat(Vector3::new(cx + dx, radar_y, cz + dz)));
        if let Some(point) = nearest_on_polygon(&footprint) {
            let rcs = if v.length_m > 6.0 { 100.0 } else { 10.0 };
            echoes.push(Echo { point, velocity: rel(v.velocity()), rcs_m2: rcs, origin: TargetOrigin::Vehicle(i) });
        }
    }
    for (i, s) in scene.structures_m.iter().enumerate() {
        let point = flat(Vector3::new(s[0], radar_y, s[1]));
        echoes.push(Echo { point, velocity: rel(Vector3::zeros()), rcs_m2: 1.0, origin: TargetOrigin::Structure(i) });
    }

    let noise = &scene.radar_noise;
    let range_noise = Normal::new(0.0, noise.range_sigma_m).expect("validated sigma");
    let bearing_noise = Normal::new(0.0, noise.bearing_sigma_rad).expect("validated sigma");
    let mut per_beam: Vec<(RadarTarget, TargetOrigin)> = Vec::new();
    for beam in Beam::ALL {
        let spec = beam_spec(rig, beam);
        for e in &echoes {
            let range = e.point.norm();
            if range <= 0.0 || e.point.y <= 0.0 {
                continue;
            }
            let bearing = e.point.x.atan2(e.point.y);
            if !spec.covers(range, bearing) {
                continue;
            }
            let rr = e.velocity.dot(&(e.point / range));
            let rr_noise = if noise.range_rate_bound_mps > 0.0 {
                rng.random_range(-noise.range_rate_bound_mps..=noise.range_rate_bound_mps)
            } else {
                0.0
            };
            per_beam.push((
                RadarTarget {
                    range_m: (range + range_noise.sample(rng)).max(0.0),
                    bearing_rad: bearing + bearing_noise.sample(rng),
                    range_rate_mps: rr + rr_noise,
                    amplitude_db: 10.0 * e.rcs_m2.log10() - 40.0 * range.log10() + 80.0,
                    beam,
                    timestamp_us: t_us,
                },
                e.origin,
            ));
        }
    }
    for _ in 0..noise.clutter_per_scan {
        let beam = Beam::ALL[rng.random_range(0..Beam::ALL.len())];
        let spec = beam_spec(rig, beam);
        let c = noise.clutter_range_rate_mps;
        per_beam.push((
            RadarTarget {
                range_m: rng.random_range(1.0..spec.max_range_m.max(1.0 + 1e-9)),
                bearing_rad: rng.random_range(-spec.half_angle_rad..=spec.half_angle_rad),
                range_rate_mps: if c > 0.0 { rng.random_range(-c..=c) } else { 0.0 },
                amplitude_db: rng.random_range(-20.0..0.0),
                beam,
                timestamp_us: t_us,
            },
            TargetOrigin::Clutter,
        ));
    }

    per_beam.sort_by(|a, b| a.0.beam.cmp(&b.0.beam).then(a.0.range_m.total_cmp(&b.0.range_m)));
    let mut kept = Vec::with_capacity(per_beam.len());
    for beam in Beam::ALL {
        kept.extend(per_beam.iter().filter(|(t, _)| t.beam == beam).take(MAX_TARGETS_PER_BEAM).copied());
    }
    let (targets, origins) = kept.into_iter().unzip();
    Ok(SimulatedScan { scan: RadarScan::new(t_us, targets)?, origins })
}

/// Camera truth, radar scan and ego motion all taken at the same instant.
pub fn render_frame(scene: &Scene, rig: &SensorRig, t_us: i64) -> Result<FrameTruth> {
    let mut rng = frame_rng(scene.seed, t_us as u64, STREAM_RADAR);
    Ok(FrameTruth {
        camera: camera_frame(scene, rig, t_us),
        radar: radar_scan(scene, rig, t_us, &mut rng)?,
        ego: ego_motion(scene, rig, t_us),
    })
}

/// Runs the scene on the sensors' clocks.
///
/// Frames are generated in parallel; each radar scan draws from its own
/// random stream so the output is independent of the thread count.
pub fn simulate(scene: &Scene, rig: &SensorRig) -> Result<SimulatedRun> {
    rig.validate()?;
    let scene = scene.resolved()?;
    let (cam_t, radar_t) = scene.clocks();
    let frames: Vec<CameraFrame> = cam_t.par_iter().map(|&t| camera_frame(&scene, rig, t)).collect();
    let scans = radar_t
        .par_iter()
        .enumerate()
        .map(|(j, &t)| radar_scan(&scene, rig, t, &mut frame_rng(scene.seed, j as u64, STREAM_RADAR)))
        .collect::<Result<Vec<_>>>()?;
    let ego_track = cam_t.iter().map(|&t| ego_motion(&scene, rig, t)).collect();
    Ok(SimulatedRun { scene, rig: *rig, frames, scans, ego_track })
}

/// Where a vehicle's radar echo should appear in the wide image: the
/// projection of its nearest footprint point, if visible.
pub fn expected_projection(scene: &Scene, rig: &SensorRig, vehicle: usize, t_us: i64) -> Option<ImagePoint> {
    let t = seconds(t_us);
    let ego = scene.ego_position(t);
    let to_radar = rig.world_to_radar(&ego);
    let radar_y = to_radar.inverse().translation.y;
    let v = scene.vehicles.get(vehicle)?;
    let [cx, cz] = v.centre_at(t);
    let (hw, hl) = (v.width_m / 2.0, v.length_m / 2.0);
    let footprint = [(-hw, -hl), (hw, -hl), (hw, hl), (-hw, hl)].map(|(dx, dz)| {
        let r = to_radar.apply(&Vector3::new(cx + dx, radar_y, cz + dz));
        Vector2::new(r.x, r.z)
    });
    let p = nearest_on_polygon(&footprint)?;
    project(&rig.wide_camera(&ego), &to_radar.inverse().apply(&Vector3::new(p.x, 0.0, p.y))).ok()
}
