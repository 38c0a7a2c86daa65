use nalgebra::{Matrix3, Vector3};

use super::{CameraIntrinsics, ImagePoint, Rotation3};
use crate::error::{Error, Result};

/// A pixel pair showing the same scene point in camera A and camera B.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correspondence {
    pub a: ImagePoint,
    pub b: ImagePoint,
}

impl Correspondence {
    pub fn new(a: ImagePoint, b: ImagePoint) -> Self {
        Self { a, b }
    }
}

/// Rays closer than this (in sine of the angle between them) count as parallel.
const PARALLEL_EPS: f64 = 1e-12;

type RayPair = (Vector3<f64>, Vector3<f64>);

/// Estimates `R_AB` from manually matched pixels.
///
/// Both pixel sets are lifted to unit bearing vectors and aligned in closed
/// form (SVD of the ray cross-covariance with a determinant correction), which
/// maximises `Σ aᵢ · R bᵢ`, i.e. minimises the summed squared chordal distance
/// between the A rays and the rotated B rays.
pub fn estimate_rotation(
    correspondences: &[Correspondence],
    k_a: &CameraIntrinsics,
    k_b: &CameraIntrinsics,
) -> Result<Rotation3> {
    if correspondences.len() < 2 {
        return Err(Error::Underdetermined(format!(
            "need at least 2 correspondences, got {}",
            correspondences.len()
        )));
    }
    let rays: Vec<RayPair> = correspondences
        .iter()
        .map(|c| (k_a.back_project(c.a).normalize(), k_b.back_project(c.b).normalize()))
        .collect();

    let spread = |pick: fn(&RayPair) -> Vector3<f64>| {
        let first = pick(&rays[0]);
        rays.iter().map(|r| pick(r).cross(&first).norm()).fold(0.0, f64::max)
    };
    if spread(|r| r.0) < PARALLEL_EPS || spread(|r| r.1) < PARALLEL_EPS {
        return Err(Error::Underdetermined("all correspondence rays are parallel".into()));
    }

    let cov: Matrix3<f64> = rays.iter().map(|(a, b)| a * b.transpose()).sum();
    let svd = cov.svd(true, true);
    let (u, v_t) = match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => return Err(Error::Underdetermined("SVD of ray covariance failed".into())),
    };
    let sign = (u * v_t).determinant().signum();
    let r = u * Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, sign)) * v_t;
    Rotation3::from_matrix(r)
}

/// Root-mean-square angle (radians) between A rays and rotated B rays.
pub fn angular_residual(
    correspondences: &[Correspondence],
    k_a: &CameraIntrinsics,
    k_b: &CameraIntrinsics,
    r_ab: &Rotation3,
) -> f64 {
    if correspondences.is_empty() {
        return 0.0;
    }
    let sum: f64 = correspondences
        .iter()
        .map(|c| {
            let a = k_a.back_project(c.a).normalize();
            let b = r_ab.apply(&k_b.back_project(c.b).normalize());
            let ang = a.cross(&b).norm().atan2(a.dot(&b));
            ang * ang
        })
        .sum();
    (sum / correspondences.len() as f64).sqrt()
}
