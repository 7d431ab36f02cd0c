//! TOML run configuration.
//!
//! Every key is optional; omitted keys fall back to the reference setup
//! ([`SimConfig::default`]). Unknown keys are rejected so typos fail loudly.

use std::fs;
use std::path::{Path, PathBuf};

use geo_smc_core::control::{ControlError, SpdMatrix4};
use geo_smc_core::dynamics::{BodyState, ConstantRate, RigidBodyParams};
use geo_smc_core::liegroup::{GroupParams, SlidingSign};
use geo_smc_core::sim::{Scenario, SimConfig};
use geo_smc_core::{UnitQuaternion, Vector4};
use nalgebra::{Matrix3, Matrix4, Vector3};
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse config {}: {source}", path.display())]
    Parse {
        path: PathBuf,
        #[source]
        source: toml::de::Error,
    },
    #[error("invalid config {}: {message}", path.display())]
    Invalid { path: PathBuf, message: String },
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    simulation: RawSimulation,
    #[serde(default)]
    body: RawBody,
    #[serde(default)]
    initial: RawInitial,
    #[serde(default)]
    reference: RawReference,
    #[serde(default)]
    geometric: RawGeometric,
    #[serde(default)]
    baseline: RawBaseline,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSimulation {
    dt: Option<f64>,
    t_end: Option<f64>,
    log_interval: Option<f64>,
    seed: Option<u64>,
    scenario: Option<Scenario>,
    controller: Option<String>,
    inertia_scale: Option<f64>,
    noise_caps: Option<[f64; 2]>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBody {
    inertia: Option<[[f64; 3]; 3]>,
    m0: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInitial {
    /// Normalized on load.
    q: Option<[f64; 4]>,
    omega: Option<[f64; 3]>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawReference {
    q0: Option<[f64; 4]>,
    omega: Option<[f64; 3]>,
}

/// A gain given either as `k` (meaning `k I`) or as a full 4×4 matrix.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
enum Gain {
    Scalar(f64),
    Matrix([[f64; 4]; 4]),
}

impl Gain {
    fn build(self, name: &str) -> Result<SpdMatrix4, ControlError> {
        let m = match self {
            Gain::Scalar(k) => Matrix4::identity() * k,
            Gain::Matrix(rows) => Matrix4::from_fn(|i, j| rows[i][j]),
        };
        SpdMatrix4::new(name, m)
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGeometric {
    lambda: Option<f64>,
    kr: Option<Gain>,
    signed_sliding: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBaseline {
    surface: Option<Gain>,
    ks: Option<Gain>,
}

/// Reads and validates a config file.
pub fn parse_config(path: &Path) -> Result<SimConfig, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_owned(),
        source,
    })?;
    parse_config_str(&text).map_err(|e| match e {
        ParseFailure::Toml(source) => ConfigError::Parse {
            path: path.to_owned(),
            source,
        },
        ParseFailure::Invalid(message) => ConfigError::Invalid {
            path: path.to_owned(),
            message,
        },
    })
}

#[derive(Debug)]
pub enum ParseFailure {
    Toml(toml::de::Error),
    Invalid(String),
}

impl std::fmt::Display for ParseFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ParseFailure::Toml(e) => write!(f, "{e}"),
            ParseFailure::Invalid(m) => f.write_str(m),
        }
    }
}

/// Parses config text; the scenario's inertia scale and noise caps apply
/// unless given explicitly.
pub fn parse_config_str(text: &str) -> Result<SimConfig, ParseFailure> {
    let raw: RawConfig = toml::from_str(text).map_err(ParseFailure::Toml)?;
    build(raw).map_err(ParseFailure::Invalid)
}

fn quaternion(name: &str, v: [f64; 4]) -> Result<UnitQuaternion, String> {
    let v = Vector4::from(v);
    if !(v.norm() > 1e-9 && v.iter().all(|x| x.is_finite())) {
        return Err(format!("{name} must be a finite non-zero 4-vector"));
    }
    Ok(UnitQuaternion::renormalized(v))
}

fn build(raw: RawConfig) -> Result<SimConfig, String> {
    let sim = raw.simulation;
    let mut cfg = SimConfig::for_scenario(
        sim.scenario.unwrap_or(Scenario::Ideal),
        sim.controller.as_deref().unwrap_or("geometric"),
    );
    cfg.dt = sim.dt.unwrap_or(cfg.dt);
    cfg.t_end = sim.t_end.unwrap_or(cfg.t_end);
    cfg.log_interval = sim.log_interval.unwrap_or(cfg.log_interval);
    cfg.seed = sim.seed.unwrap_or(cfg.seed);
    cfg.inertia_scale = sim.inertia_scale.unwrap_or(cfg.inertia_scale);
    if let Some([a, b]) = sim.noise_caps {
        cfg.noise_caps = (a, b);
    }

    if raw.body.inertia.is_some() || raw.body.m0.is_some() {
        let inertia = raw
            .body
            .inertia
            .map(|r| Matrix3::from_fn(|i, j| r[i][j]))
            .unwrap_or(*cfg.body.inertia());
        let m0 = raw.body.m0.unwrap_or(cfg.body.m0());
        cfg.body = RigidBodyParams::new(inertia, m0).map_err(|e| format!("[body] {e}"))?;
    }

    let q = match raw.initial.q {
        Some(v) => quaternion("[initial] q", v)?,
        None => cfg.initial.q,
    };
    cfg.initial = BodyState {
        q,
        omega: raw.initial.omega.map(Vector3::from).unwrap_or(cfg.initial.omega),
    };

    cfg.desired = ConstantRate {
        q0: match raw.reference.q0 {
            Some(v) => quaternion("[reference] q0", v)?,
            None => cfg.desired.q0,
        },
        omega: raw.reference.omega.unwrap_or(cfg.desired.omega),
    };

    let g = raw.geometric;
    if let Some(l) = g.lambda {
        cfg.gains.geometric.group = GroupParams::new(l).map_err(|e| format!("[geometric] lambda: {e}"))?;
    }
    if let Some(k) = g.kr {
        cfg.gains.geometric.kr = k.build("kr").map_err(|e| format!("[geometric] {e}"))?;
    }
    if g.signed_sliding == Some(true) {
        cfg.gains.sliding = SlidingSign::Signed;
    }
    let b = raw.baseline;
    if let Some(k) = b.surface {
        cfg.gains.baseline.surface = k.build("surface").map_err(|e| format!("[baseline] {e}"))?;
    }
    if let Some(k) = b.ks {
        cfg.gains.baseline.ks = k.build("ks").map_err(|e| format!("[baseline] {e}"))?;
    }

    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}
