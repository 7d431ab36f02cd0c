//! Classical fixed-step Runge–Kutta integration of the attitude models.

use nalgebra::{SVector, Vector3};

use super::SimError;
use crate::dynamics::{lagrangian_accel_at, BodyState, RigidBodyParams};
use crate::quat::{map_j, UnitQuaternion, Vector4};

/// One RK4 step of `ẋ = f(t, x)`.
pub fn rk4<const N: usize, F>(x: &SVector<f64, N>, t: f64, dt: f64, mut f: F) -> SVector<f64, N>
where
    F: FnMut(f64, &SVector<f64, N>) -> SVector<f64, N>,
{
    let half = 0.5 * dt;
    let k1 = f(t, x);
    let k2 = f(t + half, &(x + k1 * half));
    let k3 = f(t + half, &(x + k2 * half));
    let k4 = f(t + dt, &(x + k3 * dt));
    x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0)
}

fn pack(s: &BodyState) -> SVector<f64, 7> {
    let q = s.q.as_vector();
    SVector::<f64, 7>::from_column_slice(&[q[0], q[1], q[2], q[3], s.omega.x, s.omega.y, s.omega.z])
}

fn split(x: &SVector<f64, 7>) -> (Vector4, Vector3<f64>) {
    (x.fixed_rows::<4>(0).into_owned(), x.fixed_rows::<3>(4).into_owned())
}

/// Advances the Euler-form body by `dt`.
///
/// `torque_fn(t, stage_state)` is evaluated at each of the four stages; a
/// zero-order hold is simply a closure that ignores its arguments. The
/// quaternion is renormalized after the step.
pub fn rk4_step<F>(
    state: &BodyState,
    mut torque_fn: F,
    t: f64,
    dt: f64,
    params: &RigidBodyParams,
) -> Result<BodyState, SimError>
where
    F: FnMut(f64, &BodyState) -> Vector3<f64>,
{
    if !(dt > 0.0) {
        return Err(SimError::InvalidConfig(format!("step must be positive, got {dt}")));
    }
    let inertia = params.inertia();
    let inertia_inv = inertia
        .try_inverse()
        .expect("validated inertia is invertible");
    let next = rk4(&pack(state), t, dt, |ts, x| {
        let (q, omega) = split(x);
        let stage = BodyState {
            q: UnitQuaternion::from_vector(q).unwrap_or(state.q),
            omega,
        };
        let tau = torque_fn(ts, &stage);
        let qdot = map_j(&q) * omega * 0.5;
        let wdot = inertia_inv * ((inertia * omega).cross(&omega) + tau);
        let mut dx = SVector::<f64, 7>::zeros();
        dx.fixed_rows_mut::<4>(0).copy_from(&qdot);
        dx.fixed_rows_mut::<3>(4).copy_from(&wdot);
        dx
    });
    if !next.iter().all(|v| v.is_finite()) {
        return Err(SimError::Diverged { t: t + dt });
    }
    let (q, omega) = split(&next);
    let q = UnitQuaternion::from_vector(q).ok_or(SimError::Diverged { t: t + dt })?;
    Ok(BodyState { q, omega })
}

/// Raw Lagrangian state `[q; q̇]`, `q` not renormalized.
pub type LagrangianVector = SVector<f64, 8>;

/// Advances `D(q) q̈ + C(q, q̇) q̇ = τ̄` by `dt` with `τ̄ = bar_tau_fn(t, q, q̇)`.
///
/// The configuration is carried as a plain 4-vector; this integrator exists
/// to cross-check the Euler-form plant, so it does not project back onto S^3.
pub fn lagrangian_rk4_step<F>(
    x: &LagrangianVector,
    mut bar_tau_fn: F,
    t: f64,
    dt: f64,
    params: &RigidBodyParams,
) -> LagrangianVector
where
    F: FnMut(f64, &Vector4, &Vector4) -> Vector4,
{
    rk4(x, t, dt, |ts, s| {
        let q: Vector4 = s.fixed_rows::<4>(0).into_owned();
        let qdot: Vector4 = s.fixed_rows::<4>(4).into_owned();
        let bar_tau = bar_tau_fn(ts, &q, &qdot);
        let qddot = lagrangian_accel_at(&q, &qdot, &bar_tau, params);
        let mut dx = LagrangianVector::zeros();
        dx.fixed_rows_mut::<4>(0).copy_from(&qdot);
        dx.fixed_rows_mut::<4>(4).copy_from(&qddot);
        dx
    })
}
