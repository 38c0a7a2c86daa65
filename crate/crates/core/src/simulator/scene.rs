use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A box-shaped vehicle moving at constant velocity on flat ground.
///
/// World frame: x right, y down, z forward. The ground plane sits
/// `camera_height_m` below the ego camera, i.e. at `y = camera_height_m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vehicle {
    /// Footprint centre `(x, z)` at `t = 0`, metres.
    pub position_m: [f64; 2],
    /// `(vx, vz)`, metres per second.
    pub velocity_mps: [f64; 2],
    pub width_m: f64,
    pub height_m: f64,
    pub length_m: f64,
}

impl Vehicle {
    pub fn validate(&self) -> Result<()> {
        let dims = [self.width_m, self.height_m, self.length_m];
        if dims.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
            return Err(Error::Config(format!("vehicle dimensions {dims:?} must be positive")));
        }
        if self.position_m.iter().chain(&self.velocity_mps).any(|v| !v.is_finite()) {
            return Err(Error::Config("vehicle state is not finite".into()));
        }
        Ok(())
    }

    /// Footprint centre at time `t_s`.
    pub fn centre_at(&self, t_s: f64) -> [f64; 2] {
        [
            self.position_m[0] + self.velocity_mps[0] * t_s,
            self.position_m[1] + self.velocity_mps[1] * t_s,
        ]
    }

    /// The eight corners in world coordinates at time `t_s`.
    pub fn corners_at(&self, t_s: f64, ground_y: f64) -> [Vector3<f64>; 8] {
        let [cx, cz] = self.centre_at(t_s);
        let (hw, hl) = (self.width_m / 2.0, self.length_m / 2.0);
        let mut out = [Vector3::zeros(); 8];
        let mut i = 0;
        for y in [ground_y - self.height_m, ground_y] {
            for x in [cx - hw, cx + hw] {
                for z in [cz - hl, cz + hl] {
                    out[i] = Vector3::new(x, y, z);
                    i += 1;
                }
            }
        }
        out
    }

    pub fn velocity(&self) -> Vector3<f64> {
        Vector3::new(self.velocity_mps[0], 0.0, self.velocity_mps[1])
    }
}

/// Measurement noise and clutter of the simulated radar.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RadarNoise {
    /// Gaussian range noise, metres.
    pub range_sigma_m: f64,
    /// Gaussian bearing noise, radians.
    pub bearing_sigma_rad: f64,
    /// Range-rate noise is uniform in `±range_rate_bound_mps`.
    pub range_rate_bound_mps: f64,
    /// Spurious targets per scan, spread uniformly over both beams.
    pub clutter_per_scan: usize,
    /// Spurious range rates are uniform in `±clutter_range_rate_mps`.
    pub clutter_range_rate_mps: f64,
}

impl Default for RadarNoise {
    fn default() -> Self {
        Self {
            range_sigma_m: 0.1,
            bearing_sigma_rad: 0.2f64.to_radians(),
            range_rate_bound_mps: 0.1,
            clutter_per_scan: 4,
            clutter_range_rate_mps: 20.0,
        }
    }
}

impl RadarNoise {
    pub fn none() -> Self {
        Self {
            range_sigma_m: 0.0,
            bearing_sigma_rad: 0.0,
            range_rate_bound_mps: 0.0,
            clutter_per_scan: 0,
            clutter_range_rate_mps: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let v = [
            self.range_sigma_m,
            self.bearing_sigma_rad,
            self.range_rate_bound_mps,
            self.clutter_range_rate_mps,
        ];
        if v.iter().any(|x| !(*x >= 0.0 && x.is_finite())) {
            return Err(Error::Config("radar noise parameters must be non-negative".into()));
        }
        Ok(())
    }
}

/// Parameters for [`Scene::add_random_traffic`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrafficConfig {
    pub vehicles: usize,
    /// Lane centres (x, metres).
    pub lanes_m: Vec<f64>,
    /// Initial distance ahead of the ego platform, metres.
    pub depth_range_m: [f64; 2],
    /// Speeds along z of same-direction traffic, metres per second.
    pub speed_range_mps: [f64; 2],
    /// Probability that a vehicle drives towards the ego platform.
    pub oncoming_fraction: f64,
}

impl Default for TrafficConfig {
    fn default() -> Self {
        Self {
            vehicles: 12,
            lanes_m: vec![-7.0, -3.5, 0.0, 3.5, 7.0],
            depth_range_m: [15.0, 160.0],
            speed_range_mps: [10.0, 25.0],
            oncoming_fraction: 0.3,
        }
    }
}

/// Everything the simulator needs besides the rig: motion, clocks and noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Scene {
    pub duration_s: f64,
    pub camera_rate_hz: f64,
    pub radar_rate_hz: f64,
    /// Offset of the first radar scan relative to the first image.
    pub radar_phase_us: i64,
    /// Per-sample clock jitter, uniform in `±clock_jitter_us`.
    pub clock_jitter_us: i64,
    /// Ego velocity `(vx, vz)` in metres per second.
    pub ego_velocity_mps: [f64; 2],
    pub camera_height_m: f64,
    pub vehicles: Vec<Vehicle>,
    /// Static point reflectors `(x, z)` at radar height, world metres.
    pub structures_m: Vec<[f64; 2]>,
    pub radar_noise: RadarNoise,
    pub traffic: Option<TrafficConfig>,
    pub seed: u64,
}

impl Default for Scene {
    fn default() -> Self {
        Self {
            duration_s: 10.0,
            camera_rate_hz: 30.0,
            radar_rate_hz: 20.0,
            radar_phase_us: 0,
            clock_jitter_us: 1000,
            ego_velocity_mps: [0.0, 15.0],
            camera_height_m: 1.5,
            vehicles: Vec::new(),
            structures_m: default_structures(),
            radar_noise: RadarNoise::default(),
            traffic: Some(TrafficConfig::default()),
            seed: 7,
        }
    }
}

/// Guard-rail posts every 10 m on both road edges.
fn default_structures() -> Vec<[f64; 2]> {
    (1..=30).flat_map(|i| [[-10.5, 10.0 * i as f64], [10.5, 10.0 * i as f64]]).collect()
}

impl Scene {
    pub fn validate(&self) -> Result<()> {
        if !(self.duration_s >= 0.0 && self.duration_s.is_finite()) {
            return Err(Error::Config(format!("duration {} must be non-negative", self.duration_s)));
        }
        for (name, hz) in [("camera", self.camera_rate_hz), ("radar", self.radar_rate_hz)] {
            if !(hz > 0.0 && hz.is_finite()) {
                return Err(Error::Config(format!("{name} rate {hz} Hz must be positive")));
            }
        }
        let min_period_us = 1e6 / self.camera_rate_hz.max(self.radar_rate_hz);
        if self.clock_jitter_us < 0 || 2.0 * self.clock_jitter_us as f64 >= min_period_us {
            return Err(Error::Config(format!(
                "clock jitter {} us must be non-negative and below half the sample period",
                self.clock_jitter_us
            )));
        }
        if !(self.camera_height_m > 0.0) {
            return Err(Error::Config("camera height must be positive".into()));
        }
        for v in &self.vehicles {
            v.validate()?;
        }
        if let Some(t) = &self.traffic {
            if t.lanes_m.is_empty() && t.vehicles > 0 {
                return Err(Error::Config("traffic needs at least one lane".into()));
            }
            if !(t.depth_range_m[0] <= t.depth_range_m[1]) || !(t.speed_range_mps[0] <= t.speed_range_mps[1]) {
                return Err(Error::Config("traffic ranges must be ordered".into()));
            }
            if !(0.0..=1.0).contains(&t.oncoming_fraction) {
                return Err(Error::Config("oncoming fraction must lie in [0, 1]".into()));
            }
        }
        self.radar_noise.validate()
    }

    /// Ego platform (wide camera) position at time `t_s`.
    pub fn ego_position(&self, t_s: f64) -> Vector3<f64> {
        Vector3::new(self.ego_velocity_mps[0] * t_s, 0.0, self.ego_velocity_mps[1] * t_s)
    }

    pub fn ego_velocity(&self) -> Vector3<f64> {
        Vector3::new(self.ego_velocity_mps[0], 0.0, self.ego_velocity_mps[1])
    }

    /// Returns the scene with `traffic` expanded into explicit vehicles.
    ///
    /// Vehicles are placed relative to the ego position at `t = 0` and keep
    /// a minimum gap per lane so they never overlap initially.
    pub fn resolved(&self) -> Result<Scene> {
        self.validate()?;
        let mut out = self.clone();
        if let Some(cfg) = out.traffic.take() {
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
            rng.set_stream(TRAFFIC_STREAM);
            add_random_traffic(&mut out.vehicles, &cfg, &mut rng);
        }
        Ok(out)
    }

    /// Camera and radar sample times in microseconds.
    pub fn clocks(&self) -> (Vec<i64>, Vec<i64>) {
        let cam = sample_times(self.duration_s, self.camera_rate_hz, 0, self.clock_jitter_us, self.seed, CAMERA_CLOCK_STREAM);
        let radar = sample_times(
            self.duration_s,
            self.radar_rate_hz,
            self.radar_phase_us,
            self.clock_jitter_us,
            self.seed,
            RADAR_CLOCK_STREAM,
        );
        (cam, radar)
    }
}

pub(crate) const TRAFFIC_STREAM: u64 = u64::MAX;
const CAMERA_CLOCK_STREAM: u64 = u64::MAX - 1;
const RADAR_CLOCK_STREAM: u64 = u64::MAX - 2;

fn sample_times(duration_s: f64, hz: f64, phase_us: i64, jitter_us: i64, seed: u64, stream: u64) -> Vec<i64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let n = (duration_s * hz).floor() as usize;
    let period = 1e6 / hz;
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let jitter = if jitter_us > 0 { rng.random_range(-jitter_us..=jitter_us) } else { 0 };
        let t = phase_us + (k as f64 * period).round() as i64 + jitter;
        // Keep the stream strictly increasing even for a first negative sample.
        if out.last().is_none_or(|&last| t > last) {
            out.push(t);
        }
    }
    out
}

fn add_random_traffic(vehicles: &mut Vec<Vehicle>, cfg: &TrafficConfig, rng: &mut ChaCha8Rng) {
    const MIN_GAP_M: f64 = 8.0;
    let mut placed: Vec<(usize, f64)> = Vec::new();
    let mut attempts = 0;
    while placed.len() < cfg.vehicles && attempts < cfg.vehicles * 50 {
        attempts += 1;
        let lane = rng.random_range(0..cfg.lanes_m.len());
        let z = if cfg.depth_range_m[0] < cfg.depth_range_m[1] {
            rng.random_range(cfg.depth_range_m[0]..cfg.depth_range_m[1])
        } else {
            cfg.depth_range_m[0]
        };
        if placed.iter().any(|&(l, pz)| l == lane && (pz - z).abs() < MIN_GAP_M) {
            continue;
        }
        // Leave the ego lane's first stretch free so the ego never drives into a car.
        if cfg.lanes_m[lane] == 0.0 && z < 25.0 {
            continue;
        }
        placed.push((lane, z));
        let speed = if cfg.speed_range_mps[0] < cfg.speed_range_mps[1] {
            rng.random_range(cfg.speed_range_mps[0]..cfg.speed_range_mps[1])
        } else {
            cfg.speed_range_mps[0]
        };
        let oncoming = cfg.lanes_m[lane] < 0.0 && rng.random_bool(cfg.oncoming_fraction);
        let truck = rng.random_bool(0.2);
        vehicles.push(Vehicle {
            position_m: [cfg.lanes_m[lane], z],
            velocity_mps: [0.0, if oncoming { -speed } else { speed }],
            width_m: if truck { 2.5 } else { rng.random_range(1.7..1.95) },
            height_m: if truck { 3.2 } else { rng.random_range(1.4..1.7) },
            length_m: if truck { 10.0 } else { rng.random_range(4.0..5.0) },
        });
    }
}
