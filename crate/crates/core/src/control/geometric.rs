//! Sliding-mode laws on TS^3.
//!
//! Both laws have the form
//!
//! ```text
//! τ̄ = -λσ (D (q0 q̇ + q̇0 q) + C (q0 q - 1)) - K_r s
//! ```
//!
//! which turns the closed loop into `D ṡ = -(C + K_r) s`. `σ` is `+1` for the
//! unsigned sliding variable and `sgn(q0)` for the signed one.

use nalgebra::{Matrix4, Vector3};

use super::{ControlOutput, GeometricGains, TrackingController};
use crate::dynamics::{
    bar_tau_to_tau, coriolis_matrix, error_coriolis, error_mass_matrix, error_state, mass_matrix,
    tau_from_tau_c, DesiredTrajectorySample, ErrorState, LagrangianState, RigidBodyParams,
};
use crate::liegroup::{attitude_offset, SlidingSign};
use crate::quat::{map_j, Vector4};

fn sliding_law(
    q: &Vector4,
    qdot: &Vector4,
    d: &Matrix4<f64>,
    c: &Matrix4<f64>,
    gains: &GeometricGains,
    sign: SlidingSign,
) -> (Vector4, Vector4) {
    let lambda = gains.group.lambda() * sign.factor(q[0]);
    let offset = attitude_offset(q);
    let s = qdot + offset * lambda;
    // d/dt (q0 q)
    let rate = qdot * q[0] + q * qdot[0];
    let bar_tau = -(d * rate + c * offset) * lambda - gains.kr.matrix() * s;
    (bar_tau, s)
}

/// Reaching law driving `(q, q̇)` onto the sliding subgroup (regulation to `1`).
pub fn reaching_control(
    state: &LagrangianState,
    gains: &GeometricGains,
    params: &RigidBodyParams,
    sign: SlidingSign,
) -> Vector4 {
    let d = mass_matrix(&state.q, params);
    let c = coriolis_matrix(&state.q, &state.qdot, params);
    sliding_law(state.q.as_vector(), &state.qdot, &d, &c, gains, sign).0
}

/// Tracking law on the intrinsic error; returns the body torque `τ`.
///
/// `τ̄_c` from the sliding law on `(q_e, q̇_e)`, then `τ_c = 2 Jᵀ(q_e) τ̄_c`,
/// then `τ` by removing the reference-induced terms.
pub fn geometric_tracking_control(
    err: &ErrorState,
    gains: &GeometricGains,
    desired: &DesiredTrajectorySample,
    params: &RigidBodyParams,
    sign: SlidingSign,
) -> ControlOutput {
    let d = error_mass_matrix(&err.qe, params);
    let c = error_coriolis(&err.qe, &err.qedot, &err.omega_e, desired, params);
    let (bar_tau_c, s) = sliding_law(err.qe.as_vector(), &err.qedot, &d, &c, gains, sign);
    let tau_c: Vector3<f64> = map_j(err.qe.as_vector()).transpose() * bar_tau_c * 2.0;
    ControlOutput {
        tau: tau_from_tau_c(&tau_c, &err.qe, desired, params),
        sliding: s,
    }
}

/// The geometric sliding-mode tracking controller.
#[derive(Debug, Clone, Copy)]
pub struct GeometricController {
    gains: GeometricGains,
    sign: SlidingSign,
}

impl GeometricController {
    pub const NAME: &'static str = "geometric";

    pub fn new(gains: GeometricGains, sign: SlidingSign) -> Self {
        Self { gains, sign }
    }

    pub fn gains(&self) -> &GeometricGains {
        &self.gains
    }
}

impl TrackingController for GeometricController {
    fn name(&self) -> &str {
        Self::NAME
    }

    fn control(
        &self,
        state: &LagrangianState,
        desired: &DesiredTrajectorySample,
        model: &RigidBodyParams,
    ) -> ControlOutput {
        let err = error_state(state, desired, &self.gains.group);
        geometric_tracking_control(&err, &self.gains, desired, model, self.sign)
    }

    fn sliding_variable(&self, state: &LagrangianState, desired: &DesiredTrajectorySample) -> Vector4 {
        let err = error_state(state, desired, &self.gains.group);
        let q = err.qe.as_vector();
        err.qedot + attitude_offset(q) * (self.gains.group.lambda() * self.sign.factor(q[0]))
    }
}

/// Body torque of the reaching law, for simulations without a reference.
pub fn reaching_torque(
    state: &LagrangianState,
    gains: &GeometricGains,
    params: &RigidBodyParams,
    sign: SlidingSign,
) -> Vector3<f64> {
    bar_tau_to_tau(&state.q, &reaching_control(state, gains, params, sign))
}
