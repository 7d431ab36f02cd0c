//! Unit-quaternion algebra and the structural maps `J`, `L`, `Q` and `W`.
//!
//! Quaternions are stored scalar-first, `[q0, qx, qy, qz]`, everywhere in
//! this crate. The maps are defined on all of R^4; only [`UnitQuaternion`]
//! carries the unit-norm invariant.

use nalgebra::{Matrix3, Matrix4, Matrix4x3, Vector3};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// Ambient R^4 value (tangent vectors, sliding variables, generalized torques).
pub type Vector4 = nalgebra::Vector4<f64>;

/// Drift beyond which a result is projected back onto S^3.
pub const RENORM_TOL: f64 = 1e-12;

/// The identity `1 = [1, 0, 0, 0]` as a plain 4-vector.
pub fn one() -> Vector4 {
    Vector4::new(1.0, 0.0, 0.0, 0.0)
}

/// A point on S^3.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "[f64; 4]", try_from = "[f64; 4]")]
pub struct UnitQuaternion(Vector4);

impl UnitQuaternion {
    pub fn identity() -> Self {
        Self(one())
    }

    /// Builds from scalar and vector parts, normalizing.
    ///
    /// Returns `None` when the input is (numerically) zero or not finite.
    pub fn new(q0: f64, qv: Vector3<f64>) -> Option<Self> {
        Self::from_vector(Vector4::new(q0, qv.x, qv.y, qv.z))
    }

    /// Normalizes an arbitrary 4-vector onto S^3.
    pub fn from_vector(v: Vector4) -> Option<Self> {
        let n = v.norm();
        if !n.is_finite() || n < 1e-300 {
            return None;
        }
        Some(Self(v / n))
    }

    /// Wraps a vector that is already unit-norm, renormalizing only when the
    /// drift exceeds [`RENORM_TOL`].
    ///
    /// # Panics
    /// If `v` is zero or non-finite.
    pub fn renormalized(v: Vector4) -> Self {
        let n = v.norm();
        assert!(n.is_finite() && n > 0.0, "cannot normalize {v:?}");
        if (n - 1.0).abs() > RENORM_TOL {
            Self(v / n)
        } else {
            Self(v)
        }
    }

    /// Rotation by `angle` (rad) about `axis`; a zero axis yields the identity.
    pub fn from_axis_angle(axis: &Vector3<f64>, angle: f64) -> Self {
        let n = axis.norm();
        if n == 0.0 {
            return Self::identity();
        }
        let (s, c) = (0.5 * angle).sin_cos();
        let v = axis * (s / n);
        Self::renormalized(Vector4::new(c, v.x, v.y, v.z))
    }

    pub fn scalar(&self) -> f64 {
        self.0[0]
    }

    pub fn vector(&self) -> Vector3<f64> {
        Vector3::new(self.0[1], self.0[2], self.0[3])
    }

    pub fn as_vector(&self) -> &Vector4 {
        &self.0
    }

    pub fn into_vector(self) -> Vector4 {
        self.0
    }

    /// `q1 ⊗ q2`.
    pub fn mul(&self, rhs: &UnitQuaternion) -> UnitQuaternion {
        qmul(self, rhs)
    }

    pub fn inverse(&self) -> UnitQuaternion {
        qinv(self)
    }

    /// The antipodal point `-q`, same attitude.
    pub fn antipode(&self) -> UnitQuaternion {
        Self(-self.0)
    }

    pub fn rotation_matrix(&self) -> Matrix3<f64> {
        rodrigues(self)
    }
}

impl From<UnitQuaternion> for [f64; 4] {
    fn from(q: UnitQuaternion) -> Self {
        [q.0[0], q.0[1], q.0[2], q.0[3]]
    }
}

impl TryFrom<[f64; 4]> for UnitQuaternion {
    type Error = String;

    fn try_from(a: [f64; 4]) -> Result<Self, Self::Error> {
        UnitQuaternion::from_vector(Vector4::from(a))
            .ok_or_else(|| format!("quaternion {a:?} cannot be normalized"))
    }
}

/// Cross-product matrix: `hat(w) * v == w × v`.
pub fn hat(w: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -w.z, w.y, w.z, 0.0, -w.x, -w.y, w.x, 0.0)
}

fn split(x: &Vector4) -> (f64, Vector3<f64>) {
    (x[0], Vector3::new(x[1], x[2], x[3]))
}

fn stack(x0: f64, xv: &Vector3<f64>, sign: f64) -> Matrix4x3<f64> {
    let lower = Matrix3::identity() * x0 + hat(xv) * sign;
    let mut m = Matrix4x3::zeros();
    m.fixed_view_mut::<1, 3>(0, 0).copy_from(&(-xv.transpose()));
    m.fixed_view_mut::<3, 3>(1, 0).copy_from(&lower);
    m
}

/// `J(x) = [-xvᵀ; x0 I + xv^]`.
pub fn map_j(x: &Vector4) -> Matrix4x3<f64> {
    let (x0, xv) = split(x);
    stack(x0, &xv, 1.0)
}

/// `L(x) = [-xvᵀ; x0 I - xv^]`.
pub fn map_l(x: &Vector4) -> Matrix4x3<f64> {
    let (x0, xv) = split(x);
    stack(x0, &xv, -1.0)
}

fn with_first_column(x: &Vector4, rest: Matrix4x3<f64>) -> Matrix4<f64> {
    let mut m = Matrix4::zeros();
    m.set_column(0, x);
    m.fixed_view_mut::<4, 3>(0, 1).copy_from(&rest);
    m
}

/// `Q(x) = [x J(x)]`; `Q(q1) q2` is the quaternion product `q1 ⊗ q2`.
pub fn map_q(x: &Vector4) -> Matrix4<f64> {
    with_first_column(x, map_j(x))
}

/// `W(x) = [x L(x)]`; `W(q2) q1 == Q(q1) q2`.
pub fn map_w(x: &Vector4) -> Matrix4<f64> {
    with_first_column(x, map_l(x))
}

/// Conjugate of an ambient 4-vector, `[x0, -xv]`.
pub fn conj(x: &Vector4) -> Vector4 {
    Vector4::new(x[0], -x[1], -x[2], -x[3])
}

pub fn qmul(q1: &UnitQuaternion, q2: &UnitQuaternion) -> UnitQuaternion {
    UnitQuaternion::renormalized(map_q(q1.as_vector()) * q2.as_vector())
}

pub fn qinv(q: &UnitQuaternion) -> UnitQuaternion {
    UnitQuaternion(conj(q.as_vector()))
}

/// `R(q) = I + 2 q0 qv^ + 2 (qv^)^2`.
pub fn rodrigues(q: &UnitQuaternion) -> Matrix3<f64> {
    let h = hat(&q.vector());
    Matrix3::identity() + h * (2.0 * q.scalar()) + h * h * 2.0
}

/// Uniform sample on S^3: a normalized vector of four standard normals.
pub fn random_unit_quaternion<R: Rng + ?Sized>(rng: &mut R) -> UnitQuaternion {
    loop {
        let v = Vector4::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal));
        if let Some(q) = UnitQuaternion::from_vector(v) {
            return q;
        }
    }
}

/// A 4-vector of independent standard normals (not normalized).
pub fn random_vector4<R: Rng + ?Sized>(rng: &mut R) -> Vector4 {
    Vector4::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal))
}

/// A 3-vector of independent standard normals.
pub fn random_vector3<R: Rng + ?Sized>(rng: &mut R) -> Vector3<f64> {
    Vector3::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal))
}
