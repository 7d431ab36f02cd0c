//! Euclidean sliding-mode baseline on the embedding R^4.
//!
//! Uses the surface `s0 = q̇ - q̇_d + Λ(q - q_d)` with a computed-torque law
//!
//! ```text
//! τ̄ = D (q̈_d - Λ(q̇ - q̇_d)) + C (q̇_d - Λ(q - q_d)) - K_s s0
//! ```
//!
//! so that `D ṡ0 = -(C + K_s) s0` under an exact model. Unlike the geometric
//! law it ignores the group structure: `q - q_d` is a chord in R^4.

use nalgebra::Vector3;

use super::{BaselineGains, ControlOutput, TrackingController};
use crate::dynamics::{
    bar_tau_to_tau, coriolis_matrix, mass_matrix, DesiredTrajectorySample, LagrangianState,
    RigidBodyParams,
};
use crate::quat::Vector4;

/// `s0 = q̇ - q̇_d + Λ(q - q_d)`.
pub fn sliding_var_s0(
    state: &LagrangianState,
    desired: &DesiredTrajectorySample,
    gains: &BaselineGains,
) -> Vector4 {
    state.qdot - desired.qd_dot
        + gains.surface.matrix() * (state.q.as_vector() - desired.qd.as_vector())
}

/// Returns the body torque `τ = 2 Jᵀ(q) τ̄`.
pub fn baseline_tracking_control(
    state: &LagrangianState,
    desired: &DesiredTrajectorySample,
    gains: &BaselineGains,
    params: &RigidBodyParams,
) -> ControlOutput {
    let lam = gains.surface.matrix();
    let s0 = sliding_var_s0(state, desired, gains);
    let d = mass_matrix(&state.q, params);
    let c = coriolis_matrix(&state.q, &state.qdot, params);
    let ref_accel = desired.qd_ddot - lam * (state.qdot - desired.qd_dot);
    let ref_vel = desired.qd_dot - lam * (state.q.as_vector() - desired.qd.as_vector());
    let bar_tau = d * ref_accel + c * ref_vel - gains.ks.matrix() * s0;
    let tau: Vector3<f64> = bar_tau_to_tau(&state.q, &bar_tau);
    ControlOutput { tau, sliding: s0 }
}

#[derive(Debug, Clone, Copy)]
pub struct BaselineController {
    gains: BaselineGains,
}

impl BaselineController {
    pub const NAME: &'static str = "baseline";

    pub fn new(gains: BaselineGains) -> Self {
        Self { gains }
    }
}

impl TrackingController for BaselineController {
    fn name(&self) -> &str {
        Self::NAME
    }

    fn control(
        &self,
        state: &LagrangianState,
        desired: &DesiredTrajectorySample,
        model: &RigidBodyParams,
    ) -> ControlOutput {
        baseline_tracking_control(state, desired, &self.gains, model)
    }

    fn sliding_variable(&self, state: &LagrangianState, desired: &DesiredTrajectorySample) -> Vector4 {
        sliding_var_s0(state, desired, &self.gains)
    }
}
