//! Fixed-step closed-loop simulation.
//!
//! Each step: measure (optionally noisy) → controller torque from its own,
//! possibly mis-scaled, body model → one RK4 step of the true plant with the
//! torque held. Logged quantities always describe the true state.

mod integrator;
pub mod metrics;
mod noise;

pub use integrator::{lagrangian_rk4_step, rk4, rk4_step, LagrangianVector};
pub use noise::{apply_measurement_noise, NoiseLevels};

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix3, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::control::{ControlError, ControllerConfig, ControllerRegistry};
use crate::dynamics::{
    error_state, BodyState, ConstantRate, DesiredTrajectory, DynamicsError, LagrangianState,
    RigidBodyParams,
};
use crate::quat::{one, UnitQuaternion, Vector4};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error("state became non-finite at t = {t}")]
    Diverged { t: f64 },
    #[error("noisy quaternion could not be renormalized")]
    NoiseRenormalization,
    #[error("inertia scale {0} outside [0.5, 1.5]")]
    InertiaScale(f64),
    #[error("traces are on different time grids")]
    GridMismatch,
    #[error(transparent)]
    Control(#[from] ControlError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

/// The three reproduction scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Ideal,
    UncertainInertia,
    Noisy,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [Scenario::Ideal, Scenario::UncertainInertia, Scenario::Noisy];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Ideal => "ideal",
            Scenario::UncertainInertia => "uncertain_inertia",
            Scenario::Noisy => "noisy",
        }
    }

    /// Scale applied to the controller's inertia model.
    pub fn default_inertia_scale(self) -> f64 {
        match self {
            Scenario::UncertainInertia => 0.7,
            _ => 1.0,
        }
    }

    /// Caps on the attitude and rate noise amplitudes.
    pub fn default_noise_caps(self) -> (f64, f64) {
        match self {
            Scenario::Noisy => (0.1, 0.1),
            _ => (0.0, 0.0),
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ideal" => Ok(Scenario::Ideal),
            "uncertain_inertia" | "uncertain" => Ok(Scenario::UncertainInertia),
            "noisy" => Ok(Scenario::Noisy),
            other => Err(format!(
                "unknown scenario `{other}` (expected ideal, uncertain_inertia or noisy)"
            )),
        }
    }
}

/// Everything that determines a run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    /// Integration and control step (s).
    pub dt: f64,
    /// Duration (s).
    pub t_end: f64,
    /// Logging period (s); rounded to a whole number of steps.
    pub log_interval: f64,
    pub seed: u64,
    pub scenario: Scenario,
    /// Factor applied to the controller's copy of the inertia tensor.
    pub inertia_scale: f64,
    /// Caps on the per-run noise amplitudes `(n1, n2)`.
    pub noise_caps: (f64, f64),
    /// Registry name of the controller.
    pub controller: String,
    pub gains: ControllerConfig,
    /// True plant.
    pub body: RigidBodyParams,
    pub initial: BodyState,
    pub desired: ConstantRate,
}

/// `q(0) = [0, u/‖u‖]` with `u = [1, 2, 3]`.
pub fn reference_initial_attitude() -> UnitQuaternion {
    UnitQuaternion::new(0.0, Vector3::new(1.0, 2.0, 3.0)).expect("non-zero")
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t_end: 100.0,
            log_interval: 0.01,
            seed: 0,
            scenario: Scenario::Ideal,
            inertia_scale: 1.0,
            noise_caps: (0.0, 0.0),
            controller: "geometric".to_owned(),
            gains: ControllerConfig::default(),
            body: RigidBodyParams::reference(),
            initial: BodyState {
                q: reference_initial_attitude(),
                omega: Vector3::zeros(),
            },
            desired: ConstantRate::default(),
        }
    }
}

impl SimConfig {
    /// Reference setup for `scenario` driven by `controller`.
    pub fn for_scenario(scenario: Scenario, controller: &str) -> Self {
        Self {
            scenario,
            inertia_scale: scenario.default_inertia_scale(),
            noise_caps: scenario.default_noise_caps(),
            controller: controller.to_owned(),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: String| Err(SimError::InvalidConfig(m));
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.t_end >= self.dt && self.t_end.is_finite()) {
            return bad(format!("t_end {} must be at least dt {}", self.t_end, self.dt));
        }
        if !(self.log_interval >= self.dt) {
            return bad(format!(
                "log_interval {} must be at least dt {}",
                self.log_interval, self.dt
            ));
        }
        let (a, b) = self.noise_caps;
        if !(a >= 0.0 && b >= 0.0 && a.is_finite() && b.is_finite()) {
            return bad(format!("noise caps must be non-negative, got ({a}, {b})"));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }

    pub fn log_every(&self) -> usize {
        ((self.log_interval / self.dt).round() as usize).max(1)
    }
}

/// Per-record scalar metrics.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Metrics {
    /// `‖q_e - 1‖`.
    pub err_norm: f64,
    pub s_norm: f64,
    pub tau_norm: f64,
    /// `sqrt(∫ τᵀτ dt)` so far.
    pub energy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimRecord {
    pub t: f64,
    pub q: Vector4,
    pub omega: Vector3<f64>,
    pub qd: Vector4,
    pub omegad: Vector3<f64>,
    pub qe: Vector4,
    /// Sliding variable of the active controller on the true state.
    pub s: Vector4,
    /// Applied torque (N·m).
    pub tau: Vector3<f64>,
    pub metrics: Metrics,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RunStatus {
    Completed,
    /// Aborted when the state became non-finite; the trace stops before `t`.
    Diverged { t: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimTrace {
    pub config: SimConfig,
    pub records: Vec<SimRecord>,
    pub status: RunStatus,
    /// Noise amplitudes actually used.
    pub noise: NoiseLevels,
    /// Set when `m0` had to be clamped into the scaled model's eigenvalue range.
    pub m0_clamped: bool,
}

impl SimTrace {
    pub fn last(&self) -> Option<&SimRecord> {
        self.records.last()
    }

    pub fn final_energy(&self) -> f64 {
        self.last().map_or(0.0, |r| r.metrics.energy)
    }

    /// `(t, metric)` series for one of the metrics.
    pub fn series(&self, f: impl Fn(&Metrics) -> f64) -> Vec<(f64, f64)> {
        self.records.iter().map(|r| (r.t, f(&r.metrics))).collect()
    }
}

/// Controller-side body model with `factor · M`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledInertia {
    pub params: RigidBodyParams,
    pub m0_clamped: bool,
}

/// `factor · M` for `factor ∈ [0.5, 1.5]`. If `m0` leaves the scaled
/// eigenvalue bracket it is clamped back in and reported.
pub fn scale_inertia(params: &RigidBodyParams, factor: f64) -> Result<ScaledInertia, SimError> {
    if !(0.5..=1.5).contains(&factor) {
        return Err(SimError::InertiaScale(factor));
    }
    let m: Matrix3<f64> = params.inertia() * factor;
    let (lo, hi) = RigidBodyParams::validate_inertia(&m)?;
    let m0 = params.m0().clamp(lo, hi);
    Ok(ScaledInertia {
        params: RigidBodyParams::new(m, m0)?,
        m0_clamped: m0 != params.m0(),
    })
}

/// Runs one closed-loop simulation.
///
/// Configuration problems are errors; numerical divergence is not, it ends
/// the trace early with [`RunStatus::Diverged`].
pub fn run_scenario(config: &SimConfig, registry: &ControllerRegistry) -> Result<SimTrace, SimError> {
    config.validate()?;
    let controller = registry.build(&config.controller, &config.gains)?;
    let model = scale_inertia(&config.body, config.inertia_scale)?;
    let group = config.gains.geometric.group;

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let noise = NoiseLevels::draw(config.noise_caps, &mut rng);

    let steps = config.steps();
    let log_every = config.log_every();
    let dt = config.dt;

    let mut records = Vec::with_capacity(steps / log_every + 1);
    let mut state = config.initial;
    let mut status = RunStatus::Completed;
    let mut integral = 0.0;
    let mut prev_log: Option<(f64, f64)> = None;

    for k in 0..=steps {
        let t = k as f64 * dt;
        let desired = config.desired.sample(t);
        let (q_m, omega_m) = apply_measurement_noise(&state.q, &state.omega, &noise, &mut rng)?;
        let measured = LagrangianState::from(&BodyState { q: q_m, omega: omega_m });
        let out = controller.control(&measured, &desired, &model.params);
        if !out.tau.iter().all(|v| v.is_finite()) {
            status = RunStatus::Diverged { t };
            break;
        }

        if k % log_every == 0 {
            let truth = LagrangianState::from(&state);
            let err = error_state(&truth, &desired, &group);
            let s = controller.sliding_variable(&truth, &desired);
            let tau_sq = out.tau.norm_squared();
            if let Some((t_prev, sq_prev)) = prev_log {
                integral += 0.5 * (t - t_prev) * (sq_prev + tau_sq);
            }
            prev_log = Some((t, tau_sq));
            records.push(SimRecord {
                t,
                q: *state.q.as_vector(),
                omega: state.omega,
                qd: *desired.qd.as_vector(),
                omegad: desired.omegad,
                qe: *err.qe.as_vector(),
                s,
                tau: out.tau,
                metrics: Metrics {
                    err_norm: (err.qe.as_vector() - one()).norm(),
                    s_norm: s.norm(),
                    tau_norm: tau_sq.sqrt(),
                    energy: integral.sqrt(),
                },
            });
        }
        if k == steps {
            break;
        }
        let tau = out.tau;
        match rk4_step(&state, |_, _| tau, t, dt, &config.body) {
            Ok(next) => state = next,
            Err(SimError::Diverged { t }) => {
                status = RunStatus::Diverged { t };
                break;
            }
            Err(e) => return Err(e),
        }
    }

    Ok(SimTrace {
        config: config.clone(),
        records,
        status,
        noise,
        m0_clamped: model.m0_clamped,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyComparison {
    pub first: f64,
    pub second: f64,
    /// `first` compared with `second`.
    pub ordering: Ordering,
}

/// Final energies of two traces on the same time grid.
pub fn compare_energy(a: &SimTrace, b: &SimTrace) -> Result<EnergyComparison, SimError> {
    let same_grid = a.records.len() == b.records.len()
        && a.records.iter().zip(&b.records).all(|(x, y)| x.t == y.t);
    if !same_grid {
        return Err(SimError::GridMismatch);
    }
    let (first, second) = (a.final_energy(), b.final_energy());
    Ok(EnergyComparison {
        first,
        second,
        ordering: first.total_cmp(&second),
    })
}
