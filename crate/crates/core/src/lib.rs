//! Geometric sliding-mode attitude tracking on the unit quaternions.
//!
//! * [`quat`]: unit quaternions and the maps `J`, `L`, `Q`, `W`.
//! * [`liegroup`]: TS^3 as a Lie group and its sliding subgroup.
//! * [`dynamics`]: Euler and Lagrangian rigid-body models, tracking error.
//! * [`control`]: the geometric and baseline laws behind a registry.
//! * [`sim`]: fixed-step closed-loop simulation and metrics.

pub mod control;
pub mod dynamics;
pub mod liegroup;
pub mod quat;
pub mod sim;

pub use quat::{UnitQuaternion, Vector4};
