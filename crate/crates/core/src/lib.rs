//! Automatic multi-camera labelling, radar image channels and detection
//! evaluation for camera/radar fusion datasets.

// Negated comparisons such as `!(x > 0.0)` are used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calibration;
pub mod config;
pub mod dataset;
pub mod detector;
pub mod error;
pub mod evaluation;
pub mod geometry;
pub mod io;
pub mod labeling;
pub mod radar;
pub mod simulator;
pub mod sync;

pub use calibration::Calibration;
pub use error::{Error, Result};
