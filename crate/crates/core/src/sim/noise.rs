//! Measurement noise on attitude and body rate.
//!
//! `q_m = (q + n1 ν)/‖q + n1 ν‖`, `ω_m = ω + n2 u` with `ν`, `u` standard
//! normal. The amplitudes `n1`, `n2` are drawn once per run, uniformly on
//! `(0, cap)`; `ν` and `u` are redrawn at every control step.

use nalgebra::Vector3;
use rand::Rng;

use super::SimError;
use crate::quat::{random_vector3, random_vector4, UnitQuaternion};

/// Per-run noise amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NoiseLevels {
    pub n1: f64,
    pub n2: f64,
}

impl NoiseLevels {
    pub const NONE: NoiseLevels = NoiseLevels { n1: 0.0, n2: 0.0 };

    /// Draws `n1 ~ U(0, caps.0)`, `n2 ~ U(0, caps.1)`; a zero cap gives a
    /// zero amplitude without consuming randomness.
    pub fn draw<R: Rng + ?Sized>(caps: (f64, f64), rng: &mut R) -> Self {
        let mut level = |cap: f64| if cap > 0.0 { rng.gen::<f64>() * cap } else { 0.0 };
        let n1 = level(caps.0);
        let n2 = level(caps.1);
        Self { n1, n2 }
    }

    pub fn is_silent(&self) -> bool {
        self.n1 == 0.0 && self.n2 == 0.0
    }
}

/// Corrupts a true `(q, ω)` pair. Zero amplitudes return the inputs untouched.
pub fn apply_measurement_noise<R: Rng + ?Sized>(
    q: &UnitQuaternion,
    omega: &Vector3<f64>,
    levels: &NoiseLevels,
    rng: &mut R,
) -> Result<(UnitQuaternion, Vector3<f64>), SimError> {
    let q_m = if levels.n1 > 0.0 {
        let v = q.as_vector() + random_vector4(rng) * levels.n1;
        if v.norm() < 1e-9 {
            return Err(SimError::NoiseRenormalization);
        }
        UnitQuaternion::from_vector(v).ok_or(SimError::NoiseRenormalization)?
    } else {
        *q
    };
    let omega_m = if levels.n2 > 0.0 {
        omega + random_vector3(rng) * levels.n2
    } else {
        *omega
    };
    Ok((q_m, omega_m))
}
