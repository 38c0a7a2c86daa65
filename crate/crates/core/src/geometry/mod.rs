//! Pinhole camera geometry, box transfer between cameras with a shared
//! centre, and inter-camera rotation estimation.

mod bbox;
mod camera;
mod estimate;
mod rotation;
mod transfer;

pub use bbox::BBox;
pub use camera::{project, CameraIntrinsics, CameraModel, ImagePoint};
pub use estimate::{angular_residual, estimate_rotation, Correspondence};
pub(crate) use rotation::vec3_serde;
pub use rotation::{RigidTransform, Rotation3, ROTATION_TOLERANCE};
pub use transfer::{transfer_box, transfer_error_bound, transfer_point};
