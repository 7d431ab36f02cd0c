//! Attitude tracking controllers.
//!
//! Every control law implements [`TrackingController`] and is constructed by
//! name through a [`ControllerRegistry`]. The simulator only sees the trait
//! object, so new laws are added by registering a factory.

mod baseline;
mod geometric;

pub use baseline::{baseline_tracking_control, sliding_var_s0, BaselineController};
pub use geometric::{geometric_tracking_control, reaching_control, reaching_torque, GeometricController};

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::{Matrix4, SymmetricEigen, Vector3};
use thiserror::Error;

use crate::dynamics::{DesiredTrajectorySample, LagrangianState, RigidBodyParams};
use crate::liegroup::{GroupError, GroupParams, SlidingSign};
use crate::quat::Vector4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ControlError {
    #[error("{name} is not symmetric (max asymmetry {asym:e})")]
    Asymmetric { name: String, asym: f64 },
    #[error("{name} is not positive definite (min eigenvalue {min})")]
    Indefinite { name: String, min: f64 },
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("unknown controller `{name}` (available: {available})")]
    UnknownController { name: String, available: String },
}

/// A symmetric positive-definite 4×4 gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpdMatrix4(Matrix4<f64>);

impl SpdMatrix4 {
    pub fn new(name: &str, m: Matrix4<f64>) -> Result<Self, ControlError> {
        let asym = (m - m.transpose()).amax();
        if asym > 1e-12 || !asym.is_finite() {
            return Err(ControlError::Asymmetric {
                name: name.to_owned(),
                asym,
            });
        }
        let min = SymmetricEigen::new(m).eigenvalues.min();
        if min <= 0.0 {
            return Err(ControlError::Indefinite {
                name: name.to_owned(),
                min,
            });
        }
        Ok(Self(m))
    }

    pub fn scaled_identity(k: f64) -> Self {
        assert!(k > 0.0, "gain must be positive");
        Self(Matrix4::identity() * k)
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.0
    }

    pub fn min_eigenvalue(&self) -> f64 {
        SymmetricEigen::new(self.0).eigenvalues.min()
    }
}

/// `λ` and `K_r` of the geometric law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometricGains {
    pub group: GroupParams,
    pub kr: SpdMatrix4,
}

impl Default for GeometricGains {
    fn default() -> Self {
        Self {
            group: GroupParams::new(0.1).expect("positive"),
            kr: SpdMatrix4::scaled_identity(3.0),
        }
    }
}

/// `Λ` and `K_s` of the Euclidean baseline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselineGains {
    pub surface: SpdMatrix4,
    pub ks: SpdMatrix4,
}

impl Default for BaselineGains {
    fn default() -> Self {
        Self {
            surface: SpdMatrix4::scaled_identity(0.1),
            ks: SpdMatrix4::scaled_identity(3.0),
        }
    }
}

/// Everything a factory may need to build a controller.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ControllerConfig {
    pub geometric: GeometricGains,
    pub baseline: BaselineGains,
    pub sliding: SlidingSign,
}

/// Torque plus the sliding variable the law is driving to zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlOutput {
    pub tau: Vector3<f64>,
    pub sliding: Vector4,
}

pub trait TrackingController: Send + Sync {
    fn name(&self) -> &str;

    /// Torque for `state` (as measured) relative to `desired`, using the
    /// controller's own model of the body.
    fn control(
        &self,
        state: &LagrangianState,
        desired: &DesiredTrajectorySample,
        model: &RigidBodyParams,
    ) -> ControlOutput;

    /// The sliding variable this law regulates, evaluated at `state`.
    fn sliding_variable(&self, state: &LagrangianState, desired: &DesiredTrajectorySample) -> Vector4;
}

pub type ControllerFactory = fn(&ControllerConfig) -> Box<dyn TrackingController>;

/// Name → factory table.
#[derive(Clone, Default)]
pub struct ControllerRegistry {
    factories: BTreeMap<String, ControllerFactory>,
}

impl fmt::Debug for ControllerRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.factories.keys()).finish()
    }
}

impl ControllerRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registry holding `geometric` and `baseline`.
    pub fn builtin() -> Self {
        let mut reg = Self::new();
        reg.register(GeometricController::NAME, |cfg| {
            Box::new(GeometricController::new(cfg.geometric, cfg.sliding))
        });
        reg.register(BaselineController::NAME, |cfg| {
            Box::new(BaselineController::new(cfg.baseline))
        });
        reg
    }

    /// Adds or replaces a factory.
    pub fn register(&mut self, name: &str, factory: ControllerFactory) {
        self.factories.insert(name.to_owned(), factory);
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.factories.keys().map(String::as_str)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.factories.contains_key(name)
    }

    pub fn build(&self, name: &str, cfg: &ControllerConfig) -> Result<Box<dyn TrackingController>, ControlError> {
        let factory = self
            .factories
            .get(name)
            .ok_or_else(|| ControlError::UnknownController {
                name: name.to_owned(),
                available: self.names().collect::<Vec<_>>().join(", "),
            })?;
        Ok(factory(cfg))
    }
}
