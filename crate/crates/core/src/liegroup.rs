//! The tangent bundle TS^3 as a Lie group, and its sliding subgroup.
//!
//! A group element is a pair `(q, p)` with `q` on S^3 and `p` tangent at `q`
//! (`qᵀp = 0`). The product depends on a scalar `λ > 0` which also defines the
//! sliding variable `s(g) = p + λ(q0 q - 1)`; its zero set `H` is a subgroup.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quat::{conj, map_q, map_w, one, qinv, qmul, UnitQuaternion, Vector4};

/// Runtime acceptance bound on `|qᵀp|`.
pub const TANGENCY_TOL: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GroupError {
    #[error("λ must be positive and finite, got {0}")]
    NonPositiveLambda(f64),
    #[error("p is not tangent at q: |qᵀp| = {0:e}")]
    NotTangent(f64),
}

/// Group structure parameter `λ` (1/s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct GroupParams {
    lambda: f64,
}

impl GroupParams {
    pub fn new(lambda: f64) -> Result<Self, GroupError> {
        if lambda > 0.0 && lambda.is_finite() {
            Ok(Self { lambda })
        } else {
            Err(GroupError::NonPositiveLambda(lambda))
        }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

impl TryFrom<f64> for GroupParams {
    type Error = GroupError;

    fn try_from(v: f64) -> Result<Self, Self::Error> {
        Self::new(v)
    }
}

impl From<GroupParams> for f64 {
    fn from(p: GroupParams) -> f64 {
        p.lambda
    }
}

/// Which sliding variable a controller drives to zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SlidingSign {
    /// `s = p + λ(q0 q - 1)`, attracting `q = 1`.
    #[default]
    Unsigned,
    /// `s = p + λ sgn(q0)(q0 q - 1)`, attracting whichever of `±1` is nearer.
    Signed,
}

impl SlidingSign {
    /// Multiplier on the `λ` term for a given scalar part.
    pub fn factor(self, q0: f64) -> f64 {
        match self {
            SlidingSign::Unsigned => 1.0,
            SlidingSign::Signed if q0 < 0.0 => -1.0,
            SlidingSign::Signed => 1.0,
        }
    }
}

/// An element `g = (q, p)` of TS^3.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentBundlePoint {
    pub q: UnitQuaternion,
    pub p: Vector4,
}

impl TangentBundlePoint {
    /// Checked constructor: rejects `p` with `|qᵀp| > TANGENCY_TOL`.
    pub fn new(q: UnitQuaternion, p: Vector4) -> Result<Self, GroupError> {
        let g = Self { q, p };
        g.check_tangency()?;
        Ok(g)
    }

    /// `qᵀp`.
    pub fn tangency_defect(&self) -> f64 {
        self.q.as_vector().dot(&self.p)
    }

    pub fn check_tangency(&self) -> Result<(), GroupError> {
        let d = self.tangency_defect();
        if d.abs() > TANGENCY_TOL || !d.is_finite() {
            Err(GroupError::NotTangent(d.abs()))
        } else {
            Ok(())
        }
    }
}

/// `(q0 q - 1)`, the attitude part of the sliding variable.
pub(crate) fn attitude_offset(q: &Vector4) -> Vector4 {
    q * q[0] - one()
}

/// `e = (1, 0)`.
pub fn group_identity() -> TangentBundlePoint {
    TangentBundlePoint {
        q: UnitQuaternion::identity(),
        p: Vector4::zeros(),
    }
}

/// `g1 · g2`.
pub fn group_op(
    g1: &TangentBundlePoint,
    g2: &TangentBundlePoint,
    params: &GroupParams,
) -> Result<TangentBundlePoint, GroupError> {
    g1.check_tangency()?;
    g2.check_tangency()?;
    let lambda = params.lambda();
    let (q1, q2) = (g1.q.as_vector(), g2.q.as_vector());
    let q1m = map_q(q1);
    let q2w = map_w(q2);
    let q12 = q1m * q2;
    let p = q1m * g2.p
        + q2w * g1.p
        + q1m * attitude_offset(q2) * lambda
        + q2w * attitude_offset(q1) * lambda
        - (q12 * q12[0] - one()) * lambda;
    Ok(TangentBundlePoint {
        q: qmul(&g1.q, &g2.q),
        p,
    })
}

/// `g⁻¹ = (q⁻¹, p⁻¹)` with both parts conjugated.
pub fn group_inv(g: &TangentBundlePoint) -> TangentBundlePoint {
    TangentBundlePoint {
        q: qinv(&g.q),
        p: conj(&g.p),
    }
}

/// `s(g) = p + λ(q0 q - 1)`.
pub fn sliding_var(g: &TangentBundlePoint, params: &GroupParams) -> Vector4 {
    g.p + attitude_offset(g.q.as_vector()) * params.lambda()
}

/// `s(g) = p + λ sgn(q0)(q0 q - 1)`, with `sgn(0) = 1`.
///
/// Since `q0 q` is invariant under `q -> -q`, flipping the sign of the `1`
/// term alone leaves the tangent space; the whole `λ` term flips instead,
/// which keeps `s` tangent and makes `-1` the attractor on `q0 < 0`.
pub fn sliding_var_signed(g: &TangentBundlePoint, params: &GroupParams) -> Vector4 {
    sliding_var_with(g, params, SlidingSign::Signed)
}

pub fn sliding_var_with(g: &TangentBundlePoint, params: &GroupParams, sign: SlidingSign) -> Vector4 {
    let q = g.q.as_vector();
    g.p + attitude_offset(q) * (params.lambda() * sign.factor(q[0]))
}

/// `‖s(g)‖ <= tol`.
pub fn on_sliding_subgroup(g: &TangentBundlePoint, params: &GroupParams, tol: f64) -> bool {
    sliding_var(g, params).norm() <= tol
}

/// The member of `H` above `q`: `(q, -λ(q0 q - 1))`.
pub fn project_to_subgroup(q: &UnitQuaternion, params: &GroupParams) -> TangentBundlePoint {
    TangentBundlePoint {
        q: *q,
        p: attitude_offset(q.as_vector()) * -params.lambda(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::{random_unit_quaternion, random_vector4};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn lam(l: f64) -> GroupParams {
        GroupParams::new(l).unwrap()
    }

    fn random_point(rng: &mut ChaCha8Rng) -> TangentBundlePoint {
        let q = random_unit_quaternion(rng);
        let v = random_vector4(rng);
        let p = v - q.as_vector() * q.as_vector().dot(&v);
        TangentBundlePoint::new(q, p).unwrap()
    }

    fn max_diff(a: &TangentBundlePoint, b: &TangentBundlePoint) -> f64 {
        (a.q.as_vector() - b.q.as_vector()).amax().max((a.p - b.p).amax())
    }

    #[test]
    fn lambda_must_be_positive() {
        assert!(GroupParams::new(0.0).is_err());
        assert!(GroupParams::new(-1.0).is_err());
        assert!(GroupParams::new(f64::NAN).is_err());
    }

    #[test]
    fn identity_examples() {
        let e = group_identity();
        assert_eq!(*e.q.as_vector(), one());
        assert_eq!(e.p, Vector4::zeros());
        assert_eq!(group_op(&e, &e, &lam(1.0)).unwrap(), e);
        assert_eq!(group_inv(&e), e);
    }

    #[test]
    fn group_axioms_on_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for l in [0.1, 1.0, 10.0] {
            let params = lam(l);
            let e = group_identity();
            for _ in 0..200 {
                let (g1, g2, g3) = (
                    random_point(&mut rng),
                    random_point(&mut rng),
                    random_point(&mut rng),
                );
                assert!(max_diff(&group_op(&g1, &e, &params).unwrap(), &g1) < 1e-9);
                assert!(max_diff(&group_op(&e, &g1, &params).unwrap(), &g1) < 1e-9);
                let inv = group_inv(&g1);
                assert!(max_diff(&group_op(&g1, &inv, &params).unwrap(), &e) < 1e-9);
                assert!(max_diff(&group_op(&inv, &g1, &params).unwrap(), &e) < 1e-9);
                assert!(max_diff(&group_inv(&inv), &g1) == 0.0);
                let left = group_op(&group_op(&g1, &g2, &params).unwrap(), &g3, &params).unwrap();
                let right = group_op(&g1, &group_op(&g2, &g3, &params).unwrap(), &params).unwrap();
                assert!(max_diff(&left, &right) < 1e-9);
                let g12 = group_op(&g1, &g2, &params).unwrap();
                assert!(g12.tangency_defect().abs() < 1e-9);
                assert_eq!(g12.q, qmul(&g1.q, &g2.q));
            }
        }
    }

    #[test]
    fn rejects_non_tangent_input() {
        let q = UnitQuaternion::identity();
        let bad = TangentBundlePoint { q, p: one() };
        assert!(matches!(
            group_op(&bad, &group_identity(), &lam(1.0)),
            Err(GroupError::NotTangent(_))
        ));
        assert!(TangentBundlePoint::new(q, one() * 1e-7).is_ok());
    }

    #[test]
    fn inverse_stays_tangent() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..100 {
            let g = random_point(&mut rng);
            let gi = group_inv(&g);
            assert!((gi.tangency_defect() - g.tangency_defect()).abs() < 1e-15);
        }
    }

    #[test]
    fn sliding_var_examples() {
        let params = lam(1.0);
        assert_eq!(sliding_var(&group_identity(), &params), Vector4::zeros());
        let g = TangentBundlePoint {
            q: UnitQuaternion::try_from([0.0, 1.0, 0.0, 0.0]).unwrap(),
            p: Vector4::zeros(),
        };
        assert_eq!(sliding_var(&g, &params), Vector4::new(-1.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn signed_sliding_var() {
        let params = lam(1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..100 {
            let mut g = random_point(&mut rng);
            if g.q.scalar() < 0.0 {
                g.q = g.q.antipode();
            }
            assert_eq!(sliding_var_signed(&g, &params), sliding_var(&g, &params));
        }
        let minus_one = TangentBundlePoint {
            q: UnitQuaternion::try_from([-1.0, 0.0, 0.0, 0.0]).unwrap(),
            p: Vector4::zeros(),
        };
        assert_eq!(sliding_var_signed(&minus_one, &params), Vector4::zeros());
        // tangent on both half-spaces
        for _ in 0..100 {
            let g = random_point(&mut rng);
            let s = sliding_var_signed(&g, &params);
            assert!(g.q.as_vector().dot(&s).abs() < 1e-12);
        }
    }

    #[test]
    fn signed_sliding_var_is_continuous_within_half_spaces() {
        let params = lam(0.7);
        let p = Vector4::new(0.0, 0.1, -0.2, 0.3);
        for start in [0.2_f64, -0.2] {
            let mut prev: Option<Vector4> = None;
            for k in 0..=1000 {
                let q0 = start.signum() * (start.abs() + 0.7 * k as f64 / 1000.0);
                let rest = (1.0 - q0 * q0).max(0.0).sqrt();
                let q = UnitQuaternion::from_vector(Vector4::new(q0, rest, 0.0, 0.0)).unwrap();
                let p_t = p - q.as_vector() * q.as_vector().dot(&p);
                let s = sliding_var_signed(&TangentBundlePoint { q, p: p_t }, &params);
                if let Some(prev) = prev {
                    assert!((s - prev).norm() < 1e-2, "jump at q0={q0}");
                }
                prev = Some(s);
            }
        }
    }

    #[test]
    fn subgroup_membership() {
        let params = lam(1.0);
        assert!(on_sliding_subgroup(&group_identity(), &params, 1e-300));
        let g = TangentBundlePoint {
            q: UnitQuaternion::identity(),
            p: Vector4::new(0.0, 1.0, 0.0, 0.0),
        };
        assert!(!on_sliding_subgroup(&g, &params, 1e-6));
        assert_eq!(project_to_subgroup(&UnitQuaternion::identity(), &params), group_identity());
    }

    #[test]
    fn subgroup_closure() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let params = lam(0.1);
        for _ in 0..500 {
            let h1 = project_to_subgroup(&random_unit_quaternion(&mut rng), &params);
            let h2 = project_to_subgroup(&random_unit_quaternion(&mut rng), &params);
            assert!(on_sliding_subgroup(&h1, &params, 1e-12));
            assert!(h1.tangency_defect().abs() < 1e-15);
            let prod = group_op(&h1, &h2, &params).unwrap();
            assert!(sliding_var(&prod, &params).norm() < 1e-10);
            assert!(sliding_var(&group_inv(&h1), &params).norm() < 1e-10);
        }
    }
}
