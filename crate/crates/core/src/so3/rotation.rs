use std::f64::consts::{PI, TAU};
use std::ops::Mul;

use nalgebra::{Matrix3, UnitQuaternion, Vector3, Vector4};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Tolerance for orthonormality and unit determinant checks.
pub const ROTATION_TOLERANCE: f64 = 1e-9;

/// Below this angle the rotation axis is meaningless and `(0, 0, 1)` is reported.
const DEGENERATE_ANGLE: f64 = 1e-12;

/// Great-circle angle between two unit vectors, in `[0, pi]`.
///
/// Same value as `acos(clamp(a . b))`, but accurate for nearly parallel vectors.
#[inline]
pub fn angle_between(a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    a.cross(b).norm().atan2(a.dot(b))
}

/// Circular distance between two angles, in `[0, pi]`.
#[inline]
pub fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

fn unit_axis(axis: &Vector3<f64>) -> Result<Vector3<f64>> {
    let norm = axis.norm();
    if !(norm > 1e-12) || !norm.is_finite() {
        return Err(domain(format!("axis must be a non-zero finite vector, got {axis:?}")));
    }
    Ok(axis / norm)
}

/// A proper rotation: orthonormal with determinant `+1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationMatrix(Matrix3<f64>);

impl RotationMatrix {
    pub fn new(m: Matrix3<f64>) -> Result<Self> {
        if !m.iter().all(|v| v.is_finite()) {
            return Err(domain("rotation matrix has non-finite entries"));
        }
        let err = (m.transpose() * m - Matrix3::identity()).abs().max();
        if err > ROTATION_TOLERANCE {
            return Err(domain(format!("matrix is not orthonormal (max |R^T R - I| = {err:.3e})")));
        }
        let det = m.determinant();
        if (det - 1.0).abs() > ROTATION_TOLERANCE {
            return Err(domain(format!("matrix has determinant {det}, expected +1")));
        }
        Ok(Self(m))
    }

    /// From nine row-major entries.
    pub fn from_row_major(values: &[f64]) -> Result<Self> {
        if values.len() != 9 {
            return Err(domain(format!("a rotation matrix needs 9 entries, got {}", values.len())));
        }
        Self::new(Matrix3::from_row_slice(values))
    }

    pub fn identity() -> Self {
        Self(Matrix3::identity())
    }

    /// Rodrigues' formula: `I + sin(angle) K + (1 - cos(angle)) K^2`.
    pub fn about(axis: &Vector3<f64>, angle: f64) -> Result<Self> {
        if !angle.is_finite() {
            return Err(domain("rotation angle must be finite"));
        }
        let r = unit_axis(axis)?;
        let k = r.cross_matrix();
        Ok(Self(Matrix3::identity() + k * angle.sin() + k * k * (1.0 - angle.cos())))
    }

    pub fn rot_x(angle: f64) -> Self {
        Self::about(&Vector3::x(), angle).expect("finite angle")
    }

    pub fn rot_y(angle: f64) -> Self {
        Self::about(&Vector3::y(), angle).expect("finite angle")
    }

    pub fn rot_z(angle: f64) -> Self {
        Self::about(&Vector3::z(), angle).expect("finite angle")
    }

    /// Haar-uniform random rotation (normalised Gaussian quaternion).
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let q = Vector4::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal));
            if q.norm() > 1e-6 {
                let q = UnitQuaternion::from_quaternion(nalgebra::Quaternion::from_vector(q));
                return Self(*q.to_rotation_matrix().matrix());
            }
        }
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn to_row_major(&self) -> [f64; 9] {
        let m = &self.0;
        [m[(0, 0)], m[(0, 1)], m[(0, 2)], m[(1, 0)], m[(1, 1)], m[(1, 2)], m[(2, 0)], m[(2, 1)], m[(2, 2)]]
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn apply(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.0 * v
    }

    pub fn to_axis_angle(&self) -> AxisAngle {
        rotation_to_axis_angle(self)
    }
}

impl Mul for RotationMatrix {
    type Output = RotationMatrix;

    fn mul(self, rhs: RotationMatrix) -> RotationMatrix {
        RotationMatrix(self.0 * rhs.0)
    }
}

impl Mul for &RotationMatrix {
    type Output = RotationMatrix;

    fn mul(self, rhs: &RotationMatrix) -> RotationMatrix {
        RotationMatrix(self.0 * rhs.0)
    }
}

impl TryFrom<[f64; 9]> for RotationMatrix {
    type Error = crate::Error;

    fn try_from(v: [f64; 9]) -> Result<Self> {
        Self::from_row_major(&v)
    }
}

/// Rotation by `angle` about the unit `axis`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisAngle {
    pub axis: Vector3<f64>,
    pub angle: f64,
}

impl AxisAngle {
    /// Normalises `axis` and wraps `angle` into `[0, 2 pi)`.
    pub fn new(axis: Vector3<f64>, angle: f64) -> Result<Self> {
        if !angle.is_finite() {
            return Err(domain("rotation angle must be finite"));
        }
        Ok(Self { axis: unit_axis(&axis)?, angle: angle.rem_euclid(TAU) })
    }

    /// `{-r, 2 pi - phi}`, the same rotation.
    pub fn dual(&self) -> Self {
        Self { axis: -self.axis, angle: (TAU - self.angle).rem_euclid(TAU) }
    }

    pub fn to_rotation(&self) -> RotationMatrix {
        RotationMatrix::about(&self.axis, self.angle).expect("axis is unit length")
    }
}

/// Axis and angle in `[0, pi]` of a rotation.
///
/// The identity maps to axis `(0, 0, 1)`. Half turns use the symmetric part of the matrix,
/// where either axis sign describes the same rotation.
pub fn rotation_to_axis_angle(r: &RotationMatrix) -> AxisAngle {
    let m = r.matrix();
    let v = Vector3::new(m[(2, 1)] - m[(1, 2)], m[(0, 2)] - m[(2, 0)], m[(1, 0)] - m[(0, 1)]);
    let sin = 0.5 * v.norm();
    let cos = 0.5 * (m.trace() - 1.0);
    let angle = sin.atan2(cos);
    if angle < DEGENERATE_ANGLE {
        return AxisAngle { axis: Vector3::z(), angle: 0.0 };
    }
    let axis = if angle < PI - 1e-3 {
        v / v.norm()
    } else {
        // r r^T = (sym(R) - cos I) / (1 - cos)
        let s = (m + m.transpose()) * 0.5;
        let outer = (s - Matrix3::identity() * cos) / (1.0 - cos);
        let j = (0..3).max_by(|&a, &b| outer[(a, a)].total_cmp(&outer[(b, b)])).expect("3 columns");
        let mut axis: Vector3<f64> = outer.column(j).into();
        axis /= axis.norm();
        if axis.dot(&v) < 0.0 {
            axis = -axis;
        }
        axis
    };
    AxisAngle { axis, angle }
}

/// Angle of `R_a^T R_b`, in `[0, pi]`.
pub fn geodesic_distance(a: &RotationMatrix, b: &RotationMatrix) -> f64 {
    rotation_to_axis_angle(&(a.transpose() * *b)).angle
}

/// Smallest geodesic distance between `b` and any `a S` with `S` in `symmetries`.
pub fn symmetric_geodesic_distance(a: &RotationMatrix, b: &RotationMatrix, symmetries: &[RotationMatrix]) -> f64 {
    symmetries
        .iter()
        .map(|s| geodesic_distance(&(a * s), b))
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{Rotation3, Unit};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn max_diff(a: &RotationMatrix, b: &RotationMatrix) -> f64 {
        (a.matrix() - b.matrix()).abs().max()
    }

    #[test]
    fn quarter_turn_about_z() {
        let aa = RotationMatrix::rot_z(PI / 2.0).to_axis_angle();
        assert!((aa.axis - Vector3::z()).norm() < 1e-15);
        assert!((aa.angle - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn identity_gets_canonical_axis() {
        let aa = RotationMatrix::identity().to_axis_angle();
        assert_eq!(aa.axis, Vector3::z());
        assert_eq!(aa.angle, 0.0);
    }

    #[test]
    fn half_turns() {
        for axis in [Vector3::x(), Vector3::new(1.0, -2.0, 0.5), Vector3::new(0.0, 0.0, -1.0)] {
            let r = RotationMatrix::about(&axis, PI).unwrap();
            let aa = r.to_axis_angle();
            assert!((aa.angle - PI).abs() < 1e-12);
            let expected = axis.normalize();
            assert!((aa.axis.dot(&expected).abs() - 1.0).abs() < 1e-12);
            assert!(max_diff(&aa.to_rotation(), &r) < 1e-12);
        }
        // slightly short of a half turn keeps the sign
        let axis = Vector3::new(0.3, 0.4, -0.5).normalize();
        let aa = RotationMatrix::about(&axis, PI - 1e-5).unwrap().to_axis_angle();
        assert!((aa.axis - axis).norm() < 1e-9);
    }

    #[test]
    fn rodrigues_matches_nalgebra() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let axis = Vector3::from_fn(|_, _| rng.random_range(-1.0..1.0));
            let angle = rng.random_range(-7.0..7.0);
            let ours = RotationMatrix::about(&axis, angle).unwrap();
            let theirs = Rotation3::from_axis_angle(&Unit::new_normalize(axis), angle);
            assert!((ours.matrix() - theirs.matrix()).abs().max() < 1e-14);
        }
    }

    #[test]
    fn validation() {
        assert!(RotationMatrix::new(Matrix3::identity() * 2.0).is_err());
        assert!(RotationMatrix::new(Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, -1.0))).is_err());
        assert!(RotationMatrix::from_row_major(&[1.0; 8]).is_err());
        assert!(RotationMatrix::about(&Vector3::zeros(), 1.0).is_err());
        assert!(RotationMatrix::about(&Vector3::x(), f64::NAN).is_err());
        assert!(AxisAngle::new(Vector3::zeros(), 1.0).is_err());
    }

    #[test]
    fn geodesic_examples() {
        let r = RotationMatrix::rot_x(0.7) * RotationMatrix::rot_y(-1.1);
        assert!(geodesic_distance(&r, &r).abs() < 1e-12);
        let d = geodesic_distance(&RotationMatrix::identity(), &RotationMatrix::rot_z(PI / 3.0));
        assert!((d - PI / 3.0).abs() < 1e-15);
        let sym = [RotationMatrix::identity(), RotationMatrix::rot_z(PI)];
        let b = r * RotationMatrix::rot_z(PI);
        assert!(symmetric_geodesic_distance(&r, &b, &sym) < 1e-12);
        assert!((geodesic_distance(&r, &b) - PI).abs() < 1e-12);
    }

    #[test]
    fn angle_helpers() {
        assert!((circular_distance(0.1, TAU - 0.1) - 0.2).abs() < 1e-15);
        assert!((circular_distance(0.0, PI) - PI).abs() < 1e-15);
        assert_eq!(circular_distance(3.0, 3.0), 0.0);
        assert!((angle_between(&Vector3::x(), &Vector3::y()) - PI / 2.0).abs() < 1e-15);
        assert!((angle_between(&Vector3::x(), &-Vector3::x()) - PI).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn axis_angle_round_trip(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let r = RotationMatrix::random(&mut rng);
            prop_assert!(RotationMatrix::new(*r.matrix()).is_ok());
            let aa = r.to_axis_angle();
            prop_assert!((aa.axis.norm() - 1.0).abs() < 1e-12);
            prop_assert!((0.0..=PI).contains(&aa.angle));
            let back = aa.to_rotation();
            prop_assert!(max_diff(&back, &r) < 1e-9);
            prop_assert!(max_diff(&aa.dual().to_rotation(), &r) < 1e-9);
            prop_assert!(RotationMatrix::new(*back.matrix()).is_ok());
        }

        #[test]
        fn geodesic_is_a_symmetric_angle(s1 in any::<u64>(), s2 in any::<u64>()) {
            let a = RotationMatrix::random(&mut ChaCha8Rng::seed_from_u64(s1));
            let b = RotationMatrix::random(&mut ChaCha8Rng::seed_from_u64(s2));
            let d = geodesic_distance(&a, &b);
            prop_assert!((0.0..=PI).contains(&d));
            prop_assert!((d - geodesic_distance(&b, &a)).abs() < 1e-9);
            let c = (((a.transpose() * b).matrix().trace() - 1.0) / 2.0).clamp(-1.0, 1.0).acos();
            prop_assert!((d - c).abs() < 1e-6);
        }
    }
}
