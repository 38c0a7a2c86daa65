use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::geometry::{CameraIntrinsics, Correspondence, ImagePoint, Rotation3};

/// Samples `n` pixel pairs seen by two cameras with a common centre.
///
/// B pixels are uniform over B's image; their rays are rotated by `r_ab`
/// into A and kept when they land inside A's image. Independent Gaussian
/// noise of `noise_px` is then added to every coordinate of both pixels.
pub fn synthetic_correspondences<R: Rng>(
    k_a: &CameraIntrinsics,
    k_b: &CameraIntrinsics,
    r_ab: &Rotation3,
    n: usize,
    noise_px: f64,
    rng: &mut R,
) -> Result<Vec<Correspondence>> {
    let noise = Normal::new(0.0, noise_px)
        .map_err(|_| Error::Config(format!("pixel noise {noise_px} must be non-negative")))?;
    let bounds_a = k_a.bounds();
    let mut out = Vec::with_capacity(n);
    let mut attempts = 0usize;
    while out.len() < n {
        attempts += 1;
        if attempts > 1000 * n.max(1) {
            return Err(Error::Underdetermined("cameras barely overlap".into()));
        }
        let b = ImagePoint::new(
            rng.random_range(0.0..f64::from(k_b.width)),
            rng.random_range(0.0..f64::from(k_b.height)),
        );
        let ray = r_ab.apply(&k_b.back_project(b));
        if ray.z <= 0.0 {
            continue;
        }
        let a = k_a.project_ray(&ray);
        if !bounds_a.contains_point(&a) {
            continue;
        }
        let mut jitter = || noise.sample(rng);
        out.push(Correspondence::new(
            ImagePoint::new(a.u + jitter(), a.v + jitter()),
            ImagePoint::new(b.u + jitter(), b.v + jitter()),
        ));
    }
    Ok(out)
}
