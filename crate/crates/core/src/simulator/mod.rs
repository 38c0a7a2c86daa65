//! Synthetic drives for testing the pipeline end to end.
//!
//! A [`SensorRig`] fixes intrinsics and mounting; a [`Scene`] fixes motion,
//! sensor clocks and noise. [`simulate`] runs the scene on both clocks and
//! returns per-camera ground-truth boxes, radar scans with target origins and
//! the ego track. [`corrupt_detections`] turns ground truth into detector-like
//! output. Every random draw comes from a ChaCha8 stream keyed by the scene
//! seed and the sample index.

mod correspondences;
mod detector;
mod render;
mod rig;
mod scene;

pub use correspondences::synthetic_correspondences;
pub use detector::{corrupt_detections, DetectorModel};
pub use render::{
    camera_boxes, camera_frame, ego_motion, expected_projection, frame_rng, radar_scan,
    render_frame, simulate, CameraFrame, FrameTruth, GtBox, SimulatedRun, SimulatedScan,
    TargetOrigin, MIN_DEPTH_M, STREAM_AUGMENT, STREAM_NARROW_DETECTOR, STREAM_RADAR,
    STREAM_WIDE_DETECTOR,
};
pub use rig::SensorRig;
pub use scene::{RadarNoise, Scene, TrafficConfig, Vehicle};
