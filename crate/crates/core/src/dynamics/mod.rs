//! Rigid-body rotational dynamics.
//!
//! Two equivalent models are provided: the Euler form on `(q, ω)`
//!
//! ```text
//! q̇ = ½ J(q) ω,      M ω̇ = (M ω)^ ω + τ
//! ```
//!
//! and the 4-DOF Lagrangian form on `(q, q̇)`
//!
//! ```text
//! D(q) q̈ + C(q, q̇) q̇ = τ̄,   τ̄ = ½ J(q) τ
//! ```
//!
//! The simulator propagates the Euler form; the Lagrangian form is used by the
//! controllers and as a cross-check.

mod tracking;

pub use tracking::{
    constant_rate_trajectory, error_coriolis, error_mass_matrix, error_momentum, error_state,
    tau_c_from_tau, tau_from_tau_c, ConstantRate, DesiredTrajectory, DesiredTrajectorySample,
    ErrorState,
};

use nalgebra::{Matrix3, Matrix4, SymmetricEigen, Vector3};
use thiserror::Error;

use crate::liegroup::TANGENCY_TOL;
use crate::quat::{hat, map_j, map_q, UnitQuaternion, Vector4};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("inertia matrix is not symmetric (max asymmetry {0:e})")]
    AsymmetricInertia(f64),
    #[error("inertia matrix is not positive definite (min eigenvalue {0})")]
    IndefiniteInertia(f64),
    #[error("virtual inertia m0 = {m0} outside [{min}, {max}]")]
    VirtualInertiaOutOfRange { m0: f64, min: f64, max: f64 },
    #[error("q̇ is not tangent at q: |qᵀq̇| = {0:e}")]
    NotTangent(f64),
}

/// Inertia tensor used throughout the reproduction scenarios (kg·m²).
pub fn reference_inertia() -> Matrix3<f64> {
    Matrix3::new(
        3.6046, -0.0706, 0.1491, //
        -0.0706, 8.6868, 0.0449, //
        0.1491, 0.0449, 9.3484,
    )
}

/// Default virtual inertia (kg·m²).
pub const DEFAULT_M0: f64 = 6.0;

/// Inertia tensor `M` plus the virtual inertia `m0` that fills the radial
/// direction of the 4×4 mass matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidBodyParams {
    inertia: Matrix3<f64>,
    m0: f64,
    eig_min: f64,
    eig_max: f64,
}

impl RigidBodyParams {
    pub fn new(inertia: Matrix3<f64>, m0: f64) -> Result<Self, DynamicsError> {
        let (eig_min, eig_max) = Self::validate_inertia(&inertia)?;
        if !(eig_min..=eig_max).contains(&m0) {
            return Err(DynamicsError::VirtualInertiaOutOfRange {
                m0,
                min: eig_min,
                max: eig_max,
            });
        }
        Ok(Self {
            inertia,
            m0,
            eig_min,
            eig_max,
        })
    }

    /// Symmetric positive-definite check; returns the extreme eigenvalues.
    pub fn validate_inertia(inertia: &Matrix3<f64>) -> Result<(f64, f64), DynamicsError> {
        let asym = (inertia - inertia.transpose()).amax();
        if asym > 1e-12 || !asym.is_finite() {
            return Err(DynamicsError::AsymmetricInertia(asym));
        }
        let eig = SymmetricEigen::new(*inertia).eigenvalues;
        let (lo, hi) = (eig.min(), eig.max());
        if lo <= 0.0 {
            return Err(DynamicsError::IndefiniteInertia(lo));
        }
        Ok((lo, hi))
    }

    /// The reference inertia with `m0 = 6`.
    pub fn reference() -> Self {
        Self::new(reference_inertia(), DEFAULT_M0).expect("reference inertia is valid")
    }

    pub fn inertia(&self) -> &Matrix3<f64> {
        &self.inertia
    }

    pub fn m0(&self) -> f64 {
        self.m0
    }

    pub fn lambda_min(&self) -> f64 {
        self.eig_min
    }

    pub fn lambda_max(&self) -> f64 {
        self.eig_max
    }

    fn inertia_inverse(&self) -> Matrix3<f64> {
        // SPD by construction
        self.inertia.cholesky().expect("inertia is SPD").inverse()
    }
}

/// Euler-form state `(q, ω)`, `ω` in the body frame (rad/s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BodyState {
    pub q: UnitQuaternion,
    pub omega: Vector3<f64>,
}

/// Lagrangian-form state `(q, q̇)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LagrangianState {
    pub q: UnitQuaternion,
    pub qdot: Vector4,
}

impl From<&BodyState> for LagrangianState {
    fn from(s: &BodyState) -> Self {
        LagrangianState {
            q: s.q,
            qdot: omega_to_qdot(&s.q, &s.omega),
        }
    }
}

impl LagrangianState {
    /// Body rate `ω = 2 Jᵀ(q) q̇`.
    pub fn omega(&self) -> Vector3<f64> {
        map_j(self.q.as_vector()).transpose() * self.qdot * 2.0
    }
}

/// `q̇ = ½ J(q) ω`.
pub fn omega_to_qdot(q: &UnitQuaternion, omega: &Vector3<f64>) -> Vector4 {
    map_j(q.as_vector()) * omega * 0.5
}

/// `ω = 2 Jᵀ(q) q̇`; rejects `q̇` that is not tangent at `q`.
pub fn qdot_to_omega(q: &UnitQuaternion, qdot: &Vector4) -> Result<Vector3<f64>, DynamicsError> {
    let defect = q.as_vector().dot(qdot);
    if defect.abs() > TANGENCY_TOL || !defect.is_finite() {
        return Err(DynamicsError::NotTangent(defect.abs()));
    }
    Ok(map_j(q.as_vector()).transpose() * qdot * 2.0)
}

/// `ω̇ = M⁻¹((M ω)^ ω + τ)`.
pub fn euler_accel(state: &BodyState, tau: &Vector3<f64>, params: &RigidBodyParams) -> Vector3<f64> {
    let h = params.inertia() * state.omega;
    params.inertia_inverse() * (h.cross(&state.omega) + tau)
}

/// `D(q) = J(q) M Jᵀ(q) + m0 q qᵀ`, evaluated on any 4-vector.
pub fn mass_matrix_at(x: &Vector4, inertia: &Matrix3<f64>, m0: f64) -> Matrix4<f64> {
    let j = map_j(x);
    j * inertia * j.transpose() + x * x.transpose() * m0
}

pub fn mass_matrix(q: &UnitQuaternion, params: &RigidBodyParams) -> Matrix4<f64> {
    mass_matrix_at(q.as_vector(), params.inertia(), params.m0())
}

/// `C = -J(q) w^ Jᵀ(q) - D(q) Q(q̇) Qᵀ(q)` for a given body momentum `w`.
pub fn coriolis_with_momentum(
    q: &Vector4,
    qdot: &Vector4,
    momentum: &Vector3<f64>,
    d: &Matrix4<f64>,
) -> Matrix4<f64> {
    let j = map_j(q);
    -(j * hat(momentum) * j.transpose()) - d * map_q(qdot) * map_q(q).transpose()
}

/// `C(q, q̇)` with `w = M ω`, `ω = 2 Jᵀ(q) q̇`.
pub fn coriolis_matrix(q: &UnitQuaternion, qdot: &Vector4, params: &RigidBodyParams) -> Matrix4<f64> {
    let x = q.as_vector();
    let omega = map_j(x).transpose() * qdot * 2.0;
    let d = mass_matrix(q, params);
    coriolis_with_momentum(x, qdot, &(params.inertia() * omega), &d)
}

fn solve_spd(d: &Matrix4<f64>, rhs: &Vector4) -> Vector4 {
    match d.cholesky() {
        Some(ch) => ch.solve(rhs),
        None => d.lu().solve(rhs).expect("mass matrix is invertible"),
    }
}

/// `q̈ = D(q)⁻¹(τ̄ - C(q, q̇) q̇)`.
pub fn lagrangian_accel(state: &LagrangianState, bar_tau: &Vector4, params: &RigidBodyParams) -> Vector4 {
    lagrangian_accel_at(state.q.as_vector(), &state.qdot, bar_tau, params)
}

/// [`lagrangian_accel`] on an unnormalized configuration, for integrators
/// that carry `q` as a plain 4-vector.
pub fn lagrangian_accel_at(q: &Vector4, qdot: &Vector4, bar_tau: &Vector4, params: &RigidBodyParams) -> Vector4 {
    let d = mass_matrix_at(q, params.inertia(), params.m0());
    let omega = map_j(q).transpose() * qdot * 2.0;
    let c = coriolis_with_momentum(q, qdot, &(params.inertia() * omega), &d);
    solve_spd(&d, &(bar_tau - c * qdot))
}

/// `τ̄ = ½ J(q) τ`.
pub fn tau_to_bar_tau(q: &UnitQuaternion, tau: &Vector3<f64>) -> Vector4 {
    map_j(q.as_vector()) * tau * 0.5
}

/// `τ = 2 Jᵀ(q) τ̄`. Any component of `τ̄` along `q` is discarded.
pub fn bar_tau_to_tau(q: &UnitQuaternion, bar_tau: &Vector4) -> Vector3<f64> {
    map_j(q.as_vector()).transpose() * bar_tau * 2.0
}

/// Rotational kinetic energy `½ ωᵀ M ω`.
pub fn kinetic_energy(omega: &Vector3<f64>, params: &RigidBodyParams) -> f64 {
    0.5 * omega.dot(&(params.inertia() * omega))
}
