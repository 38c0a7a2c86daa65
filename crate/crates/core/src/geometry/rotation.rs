use nalgebra::{Matrix3, Rotation3 as NaRotation, Unit, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used when checking orthonormality and determinant.
pub const ROTATION_TOLERANCE: f64 = 1e-9;

/// A proper 3×3 rotation matrix.
///
/// Serialized as nine row-major numbers. Construction checks `RᵀR = I` and
/// `det R = +1` to within [`ROTATION_TOLERANCE`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 9]", into = "[f64; 9]")]
pub struct Rotation3(Matrix3<f64>);

impl Rotation3 {
    pub fn identity() -> Self {
        Self(Matrix3::identity())
    }

    /// Validates and wraps a matrix.
    pub fn from_matrix(m: Matrix3<f64>) -> Result<Self> {
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("rotation has non-finite entries".into()));
        }
        let ortho = (m.transpose() * m - Matrix3::identity()).abs().max();
        if ortho > ROTATION_TOLERANCE {
            return Err(Error::Invalid(format!(
                "rotation is not orthonormal (max |RᵀR - I| = {ortho:e})"
            )));
        }
        let det = m.determinant();
        if (det - 1.0).abs() > ROTATION_TOLERANCE {
            return Err(Error::Invalid(format!("rotation determinant is {det}, expected +1")));
        }
        Ok(Self(m))
    }

    pub fn from_row_major(rows: [f64; 9]) -> Result<Self> {
        Self::from_matrix(Matrix3::from_row_slice(&rows))
    }

    /// Rotation of `angle` radians about `axis` (right-handed).
    pub fn from_axis_angle(axis: Vector3<f64>, angle: f64) -> Self {
        if axis.norm() == 0.0 || angle == 0.0 {
            return Self::identity();
        }
        let r = NaRotation::from_axis_angle(&Unit::new_normalize(axis), angle);
        Self(*r.matrix())
    }

    /// Composition of yaw (about camera y), pitch (about x) and roll (about z),
    /// applied in the order roll, pitch, yaw.
    pub fn from_yaw_pitch_roll(yaw: f64, pitch: f64, roll: f64) -> Self {
        let y = Self::from_axis_angle(Vector3::y(), yaw);
        let p = Self::from_axis_angle(Vector3::x(), pitch);
        let r = Self::from_axis_angle(Vector3::z(), roll);
        y.compose(&p).compose(&r)
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn to_row_major(&self) -> [f64; 9] {
        let m = &self.0;
        [
            m[(0, 0)],
            m[(0, 1)],
            m[(0, 2)],
            m[(1, 0)],
            m[(1, 1)],
            m[(1, 2)],
            m[(2, 0)],
            m[(2, 1)],
            m[(2, 2)],
        ]
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    /// `self * other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        Self(self.0 * other.0)
    }

    pub fn apply(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.0 * v
    }

    /// Geodesic angle (radians) between two rotations.
    pub fn angle_to(&self, other: &Self) -> f64 {
        let rel = self.0.transpose() * other.0;
        let c = ((rel.trace() - 1.0) / 2.0).clamp(-1.0, 1.0);
        // acos loses precision near zero; recover the angle from the skew part.
        let skew = Vector3::new(
            rel[(2, 1)] - rel[(1, 2)],
            rel[(0, 2)] - rel[(2, 0)],
            rel[(1, 0)] - rel[(0, 1)],
        );
        let s = skew.norm() / 2.0;
        s.atan2(c)
    }
}

impl Default for Rotation3 {
    fn default() -> Self {
        Self::identity()
    }
}

impl TryFrom<[f64; 9]> for Rotation3 {
    type Error = Error;

    fn try_from(rows: [f64; 9]) -> Result<Self> {
        Self::from_row_major(rows)
    }
}

impl From<Rotation3> for [f64; 9] {
    fn from(r: Rotation3) -> Self {
        r.to_row_major()
    }
}

/// Rotation followed by translation: `p' = R·p + t`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RigidTransform {
    pub rotation: Rotation3,
    /// Metres.
    #[serde(with = "vec3_serde")]
    pub translation: Vector3<f64>,
}

impl RigidTransform {
    pub fn new(rotation: Rotation3, translation: Vector3<f64>) -> Self {
        Self { rotation, translation }
    }

    pub fn identity() -> Self {
        Self::default()
    }

    pub fn from_translation(translation: Vector3<f64>) -> Self {
        Self { rotation: Rotation3::identity(), translation }
    }

    pub fn apply(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation.apply(p) + self.translation
    }

    pub fn inverse(&self) -> Self {
        let rt = self.rotation.transpose();
        Self { rotation: rt, translation: -rt.apply(&self.translation) }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            rotation: self.rotation.compose(&other.rotation),
            translation: self.rotation.apply(&other.translation) + self.translation,
        }
    }
}

pub(crate) mod vec3_serde {
    use nalgebra::Vector3;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Vector3<f64>, s: S) -> Result<S::Ok, S::Error> {
        [v.x, v.y, v.z].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vector3<f64>, D::Error> {
        let [x, y, z] = <[f64; 3]>::deserialize(d)?;
        Ok(Vector3::new(x, y, z))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn rejects_non_orthonormal() {
        assert!(Rotation3::from_row_major([1.0, 0.1, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]).is_err());
        // reflection
        assert!(Rotation3::from_row_major([-1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]).is_err());
    }

    #[test]
    fn angle_between_small_rotations() {
        let a = Rotation3::from_axis_angle(Vector3::y(), 2f64.to_radians());
        assert_abs_diff_eq!(Rotation3::identity().angle_to(&a), 2f64.to_radians(), epsilon = 1e-14);
        let tiny = Rotation3::from_axis_angle(Vector3::x(), 1e-9);
        assert_abs_diff_eq!(Rotation3::identity().angle_to(&tiny), 1e-9, epsilon = 1e-18);
    }

    #[test]
    fn transform_inverse_round_trip() {
        let t = RigidTransform::new(
            Rotation3::from_yaw_pitch_roll(0.3, -0.1, 0.05),
            Vector3::new(1.0, -2.0, 0.5),
        );
        let p = Vector3::new(3.0, 4.0, 5.0);
        let back = t.inverse().apply(&t.apply(&p));
        assert_abs_diff_eq!((back - p).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn json_is_row_major() {
        let r = Rotation3::from_axis_angle(Vector3::z(), std::f64::consts::FRAC_PI_2);
        let rows = r.to_row_major();
        // x axis maps to y: first column is (0, 1, 0)
        assert_abs_diff_eq!(rows[3], 1.0, epsilon = 1e-15);
        let json = serde_json::to_string(&r).unwrap();
        let back: Rotation3 = serde_json::from_str(&json).unwrap();
        assert_abs_diff_eq!(back.angle_to(&r), 0.0, epsilon = 1e-12);
    }
}
