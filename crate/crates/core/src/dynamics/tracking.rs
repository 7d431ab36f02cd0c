//! Desired trajectories and the intrinsic tracking error `g_e = g_d⁻¹ · g`.

use nalgebra::{Matrix3, Matrix4, Vector3};
use serde::{Deserialize, Serialize};

use super::{coriolis_with_momentum, mass_matrix_at, LagrangianState, RigidBodyParams};
use crate::liegroup::{attitude_offset, GroupParams};
use crate::quat::{conj, hat, map_j, map_q, map_w, one, qmul, UnitQuaternion, Vector4};

/// Reference attitude and its derivatives at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesiredTrajectorySample {
    pub qd: UnitQuaternion,
    /// Desired body rate (rad/s).
    pub omegad: Vector3<f64>,
    /// Desired body acceleration (rad/s²).
    pub omegad_dot: Vector3<f64>,
    /// `q̇_d = ½ J(q_d) ω_d`.
    pub qd_dot: Vector4,
    /// `q̈_d = ½(J(q_d) ω̇_d + J(q̇_d) ω_d)`.
    pub qd_ddot: Vector4,
}

impl DesiredTrajectorySample {
    /// Completes the quaternion derivatives from attitude and body rates.
    pub fn from_rates(qd: UnitQuaternion, omegad: Vector3<f64>, omegad_dot: Vector3<f64>) -> Self {
        let qd_dot = map_j(qd.as_vector()) * omegad * 0.5;
        let qd_ddot = (map_j(qd.as_vector()) * omegad_dot + map_j(&qd_dot) * omegad) * 0.5;
        Self {
            qd,
            omegad,
            omegad_dot,
            qd_dot,
            qd_ddot,
        }
    }
}

pub trait DesiredTrajectory: Send + Sync {
    fn sample(&self, t: f64) -> DesiredTrajectorySample;
}

/// Constant body rate `ω_d` from `q_d(0)`; `q_d(t) = q_d(0) ⊗ exp(½ ω_d t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantRate {
    pub q0: UnitQuaternion,
    pub omega: [f64; 3],
}

impl Default for ConstantRate {
    fn default() -> Self {
        Self {
            q0: UnitQuaternion::identity(),
            omega: [0.0, 0.0, 0.1],
        }
    }
}

impl DesiredTrajectory for ConstantRate {
    fn sample(&self, t: f64) -> DesiredTrajectorySample {
        constant_rate_trajectory(&Vector3::from(self.omega), &self.q0, t)
    }
}

pub fn constant_rate_trajectory(
    omega_d: &Vector3<f64>,
    q_d0: &UnitQuaternion,
    t: f64,
) -> DesiredTrajectorySample {
    let rate = omega_d.norm();
    let step = UnitQuaternion::from_axis_angle(omega_d, rate * t);
    DesiredTrajectorySample::from_rates(qmul(q_d0, &step), *omega_d, Vector3::zeros())
}

/// Intrinsic error between the body and the reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorState {
    /// `q_e = Qᵀ(q_d) q`.
    pub qe: UnitQuaternion,
    /// `q̇_e = Q(q_d⁻¹) q̇ + W(q) q̇_d⁻¹ = ½ J(q_e) ω_e`.
    pub qedot: Vector4,
    /// `ω_e = ω - Rᵀ(q_e) ω_d`.
    pub omega_e: Vector3<f64>,
    /// Tangent part of `g_d⁻¹ · g` on TS^3.
    pub pe: Vector4,
}

impl ErrorState {
    /// `‖q_e - 1‖`.
    pub fn attitude_error(&self) -> f64 {
        (self.qe.as_vector() - one()).norm()
    }
}

pub fn error_state(
    state: &LagrangianState,
    desired: &DesiredTrajectorySample,
    params: &GroupParams,
) -> ErrorState {
    let lambda = params.lambda();
    let q = state.q.as_vector();
    let qd = desired.qd.as_vector();
    let qd_inv = conj(qd);
    let qd_inv_q = map_q(&qd_inv);
    let w_q = map_w(q);

    let qe = UnitQuaternion::renormalized(map_q(qd).transpose() * q);
    let qedot = qd_inv_q * state.qdot + w_q * conj(&desired.qd_dot);
    let omega = state.omega();
    let omega_e = omega - qe.rotation_matrix().transpose() * desired.omegad;

    let pe = qedot + qd_inv_q * attitude_offset(q) * lambda + w_q * attitude_offset(&qd_inv) * lambda
        - (qd_inv_q * q * qd.dot(q) - one()) * lambda;

    ErrorState {
        qe,
        qedot,
        omega_e,
        pe,
    }
}

/// `D(q_e)`; the same inertia enters the error dynamics as the plant.
pub fn error_mass_matrix(qe: &UnitQuaternion, params: &RigidBodyParams) -> Matrix4<f64> {
    mass_matrix_at(qe.as_vector(), params.inertia(), params.m0())
}

/// `w_r = M ω_e - (tr(M) I - 2M) Rᵀ(q_e) ω_d`.
pub fn error_momentum(
    qe: &UnitQuaternion,
    omega_e: &Vector3<f64>,
    omegad: &Vector3<f64>,
    params: &RigidBodyParams,
) -> Vector3<f64> {
    let m = params.inertia();
    let shaped = Matrix3::identity() * m.trace() - m * 2.0;
    m * omega_e - shaped * (qe.rotation_matrix().transpose() * omegad)
}

/// `C(q_e, q̇_e) = -J(q_e) w_r^ Jᵀ(q_e) - D(q_e) Q(q̇_e) Qᵀ(q_e)`.
pub fn error_coriolis(
    qe: &UnitQuaternion,
    qedot: &Vector4,
    omega_e: &Vector3<f64>,
    desired: &DesiredTrajectorySample,
    params: &RigidBodyParams,
) -> Matrix4<f64> {
    let d = error_mass_matrix(qe, params);
    let w_r = error_momentum(qe, omega_e, &desired.omegad, params);
    coriolis_with_momentum(qe.as_vector(), qedot, &w_r, &d)
}

/// Body torque from the error-frame torque:
/// `τ = τ_c - (M Rᵀ ω_d)^ Rᵀ ω_d + M Rᵀ ω̇_d`, `R = R(q_e)`.
pub fn tau_from_tau_c(
    tau_c: &Vector3<f64>,
    qe: &UnitQuaternion,
    desired: &DesiredTrajectorySample,
    params: &RigidBodyParams,
) -> Vector3<f64> {
    tau_c - feedforward_offset(qe, desired, params)
}

/// Inverse of [`tau_from_tau_c`].
pub fn tau_c_from_tau(
    tau: &Vector3<f64>,
    qe: &UnitQuaternion,
    desired: &DesiredTrajectorySample,
    params: &RigidBodyParams,
) -> Vector3<f64> {
    tau + feedforward_offset(qe, desired, params)
}

// (M v)^ v - M Rᵀ ω̇_d with v = Rᵀ ω_d
fn feedforward_offset(
    qe: &UnitQuaternion,
    desired: &DesiredTrajectorySample,
    params: &RigidBodyParams,
) -> Vector3<f64> {
    let rt = qe.rotation_matrix().transpose();
    let v = rt * desired.omegad;
    let m = params.inertia();
    hat(&(m * v)) * v - m * (rt * desired.omegad_dot)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{omega_to_qdot, BodyState};
    use crate::liegroup::{group_inv, group_op, TangentBundlePoint};
    use crate::quat::{qinv, random_unit_quaternion, random_vector3};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn lam() -> GroupParams {
        GroupParams::new(0.1).unwrap()
    }

    fn random_case(rng: &mut ChaCha8Rng) -> (LagrangianState, DesiredTrajectorySample) {
        let q = random_unit_quaternion(rng);
        let body = BodyState {
            q,
            omega: random_vector3(rng),
        };
        let desired = DesiredTrajectorySample::from_rates(
            random_unit_quaternion(rng),
            random_vector3(rng),
            random_vector3(rng),
        );
        (LagrangianState::from(&body), desired)
    }

    #[test]
    fn constant_rate_examples() {
        let wd = Vector3::new(0.0, 0.0, 0.1);
        let q0 = UnitQuaternion::try_from([0.5, 0.5, 0.5, 0.5]).unwrap();
        assert_eq!(constant_rate_trajectory(&wd, &q0, 0.0).qd, q0);
        // one full turn of the body is a half turn on S^3
        let full = constant_rate_trajectory(&wd, &q0, 20.0 * PI);
        assert!((full.qd.as_vector() + q0.as_vector()).amax() < 1e-12);
        let twice = constant_rate_trajectory(&wd, &q0, 40.0 * PI);
        assert!((twice.qd.as_vector() - q0.as_vector()).amax() < 1e-12);
        for t in [0.3, 7.0, 55.5] {
            let s = constant_rate_trajectory(&wd, &q0, t);
            assert!((s.qd_dot - map_j(s.qd.as_vector()) * wd * 0.5).amax() < 1e-12);
            assert_eq!(s.omegad_dot, Vector3::zeros());
            // finite-difference check of q̇_d and q̈_d
            let h = 1e-4;
            let a = constant_rate_trajectory(&wd, &q0, t - h);
            let b = constant_rate_trajectory(&wd, &q0, t + h);
            let fd = (b.qd.as_vector() - a.qd.as_vector()) / (2.0 * h);
            assert!((fd - s.qd_dot).amax() < 1e-9);
            let fdd = (b.qd_dot - a.qd_dot) / (2.0 * h);
            assert!((fdd - s.qd_ddot).amax() < 1e-9);
        }
    }

    #[test]
    fn perfect_tracking_gives_zero_error() {
        let wd = Vector3::new(0.0, 0.0, 0.1);
        let desired = constant_rate_trajectory(&wd, &UnitQuaternion::identity(), 3.0);
        let state = LagrangianState {
            q: desired.qd,
            qdot: omega_to_qdot(&desired.qd, &wd),
        };
        let err = error_state(&state, &desired, &lam());
        assert!((err.qe.as_vector() - one()).amax() < 1e-15);
        assert!(err.omega_e.amax() < 1e-15);
        assert!(err.qedot.amax() < 1e-15);
        assert!(err.pe.amax() < 1e-15);
    }

    #[test]
    fn error_fields_are_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..300 {
            let (state, desired) = random_case(&mut rng);
            let err = error_state(&state, &desired, &lam());
            let direct = qmul(&qinv(&desired.qd), &state.q);
            assert!((err.qe.as_vector() - direct.as_vector()).amax() < 1e-14);
            let kin = map_j(err.qe.as_vector()) * err.omega_e * 0.5;
            assert!((err.qedot - kin).amax() < 1e-10);
            assert!(err.qe.as_vector().dot(&err.qedot).abs() < 1e-9);

            // p_e is the tangent part of g_d⁻¹ · g
            let gd = TangentBundlePoint::new(desired.qd, desired.qd_dot).unwrap();
            let g = TangentBundlePoint::new(state.q, state.qdot).unwrap();
            let ge = group_op(&group_inv(&gd), &g, &lam()).unwrap();
            assert!((ge.p - err.pe).amax() < 1e-12);
        }
    }

    #[test]
    fn error_momentum_regulation_limit() {
        let p = RigidBodyParams::reference();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let qe = random_unit_quaternion(&mut rng);
        let we = random_vector3(&mut rng);
        assert_eq!(error_momentum(&qe, &we, &Vector3::zeros(), &p), p.inertia() * we);
    }

    #[test]
    fn tau_c_mapping() {
        let p = RigidBodyParams::reference();
        let rest = DesiredTrajectorySample::from_rates(
            UnitQuaternion::identity(),
            Vector3::zeros(),
            Vector3::zeros(),
        );
        let tc = Vector3::new(0.1, -0.2, 0.3);
        assert_eq!(tau_from_tau_c(&tc, &UnitQuaternion::identity(), &rest, &p), tc);

        let wd = Vector3::new(0.0, 0.0, 0.1);
        let spin = DesiredTrajectorySample::from_rates(UnitQuaternion::identity(), wd, Vector3::zeros());
        let tau = tau_from_tau_c(&tc, &UnitQuaternion::identity(), &spin, &p);
        let expected = tc - (p.inertia() * wd).cross(&wd);
        assert!((tau - expected).amax() < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let (_, desired) = random_case(&mut rng);
        let qe = random_unit_quaternion(&mut rng);
        let back = tau_c_from_tau(&tau_from_tau_c(&tc, &qe, &desired, &p), &qe, &desired, &p);
        assert!((back - tc).amax() < 1e-12);
    }
}
