//! Numerical property suites run by `geo-smc verify`.
//!
//! Each property is checked on many random samples. A report records how
//! many samples passed and the worst error seen next to its tolerance.

use std::fmt;
use std::time::{Duration, Instant};

use geo_smc_core::control::{reaching_torque, GeometricGains};
use geo_smc_core::dynamics::{
    coriolis_matrix, error_coriolis, error_mass_matrix, error_state, kinetic_energy, mass_matrix,
    mass_matrix_at, omega_to_qdot, qdot_to_omega, tau_c_from_tau, BodyState, ConstantRate,
    DesiredTrajectory, LagrangianState, RigidBodyParams,
};
use geo_smc_core::liegroup::{
    group_identity, group_inv, group_op, project_to_subgroup, sliding_var, GroupParams,
    SlidingSign, TangentBundlePoint,
};
use geo_smc_core::quat::{
    map_j, map_l, map_q, map_w, random_unit_quaternion, random_vector3, random_vector4, Vector4,
};
use geo_smc_core::sim::{lagrangian_rk4_step, rk4_step, LagrangianVector};
use geo_smc_core::UnitQuaternion;
use nalgebra::{Matrix3, Matrix4, Matrix4x3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

pub const SUITES: [&str; 4] = ["algebra", "group", "dynamics", "control"];

/// Group-structure parameters the group suite sweeps over.
pub const LAMBDAS: [f64; 3] = [0.1, 1.0, 10.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Samples per algebraic or group property.
    pub samples: usize,
    /// Samples per dynamics property.
    pub dynamics_samples: usize,
    /// Random starts for the sliding-phase decay check.
    pub decay_starts: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            samples: 10_000,
            dynamics_samples: 1_000,
            decay_starts: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyReport {
    pub id: String,
    pub description: String,
    pub samples: usize,
    pub passed: usize,
    pub max_error: f64,
    pub tolerance: f64,
}

impl PropertyReport {
    pub fn ok(&self) -> bool {
        self.samples > 0 && self.passed == self.samples
    }
}

impl fmt::Display for PropertyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "  [{}] {:<22} {:>6}/{:<6} max {:.3e} (tol {:.1e})  {}",
            if self.ok() { " ok " } else { "FAIL" },
            self.id,
            self.passed,
            self.samples,
            self.max_error,
            self.tolerance,
            self.description
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub properties: Vec<PropertyReport>,
    #[serde(serialize_with = "secs")]
    pub elapsed: Duration,
}

fn secs<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.properties.iter().all(PropertyReport::ok)
    }

    pub fn property(&self, id: &str) -> Option<&PropertyReport> {
        self.properties.iter().find(|p| p.id == id)
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let passed = self.properties.iter().filter(|p| p.ok()).count();
        writeln!(
            f,
            "suite {}: {}/{} properties passed in {:.2} s",
            self.name,
            passed,
            self.properties.len(),
            self.elapsed.as_secs_f64()
        )?;
        for p in &self.properties {
            writeln!(f, "{p}")?;
        }
        Ok(())
    }
}

struct Tally {
    report: PropertyReport,
}

impl Tally {
    fn new(id: impl Into<String>, description: impl Into<String>, tolerance: f64) -> Self {
        Self {
            report: PropertyReport {
                id: id.into(),
                description: description.into(),
                samples: 0,
                passed: 0,
                max_error: 0.0,
                tolerance,
            },
        }
    }

    fn add(&mut self, err: f64) {
        let r = &mut self.report;
        r.samples += 1;
        // NaN counts as a failure and poisons the maximum
        if err <= r.tolerance {
            r.passed += 1;
        }
        r.max_error = if err.is_nan() { f64::NAN } else { r.max_error.max(err) };
    }

    fn finish(self) -> PropertyReport {
        self.report
    }
}

/// Max-abs difference over `max(1, max |entry|)`.
fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let diff = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let scale = a.iter().chain(b).map(|v| v.abs()).fold(1.0, f64::max);
    diff / scale
}

fn max_abs(a: &[f64]) -> f64 {
    a.iter().map(|v| v.abs()).fold(0.0, f64::max)
}

/// Runs one suite by name.
pub fn run_suite(name: &str, opts: &VerifyOptions) -> Option<SuiteReport> {
    let start = Instant::now();
    let properties = match name {
        "algebra" => algebra(opts),
        "group" => group(opts),
        "dynamics" => dynamics(opts),
        "control" => control(opts),
        _ => return None,
    };
    Some(SuiteReport {
        name: name.to_owned(),
        properties,
        elapsed: start.elapsed(),
    })
}

pub fn run_all(opts: &VerifyOptions) -> Vec<SuiteReport> {
    SUITES
        .iter()
        .map(|s| run_suite(s, opts).expect("known suite"))
        .collect()
}

fn algebra(opts: &VerifyOptions) -> Vec<PropertyReport> {
    const TOL: f64 = 1e-10;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut out = Vec::new();

    type Map = fn(&Vector4) -> Matrix4x3<f64>;
    for (name, m) in [("J", map_j as Map), ("L", map_l as Map)] {
        let mut p1 = Tally::new(format!("p{name}1"), format!("{name}ᵀ(x)y = -{name}ᵀ(y)x"), TOL);
        let mut p2 = Tally::new(format!("p{name}2"), format!("{name}ᵀ(x)(kx) = 0"), TOL);
        let mut p3 = Tally::new(format!("p{name}3"), format!("{name}ᵀ(x){name}(x) = |x|² I"), TOL);
        for _ in 0..opts.samples {
            let x = random_vector4(&mut rng);
            let y = random_vector4(&mut rng);
            let k: f64 = rng.gen_range(-10.0..10.0);
            p1.add(rel_err(
                (m(&x).transpose() * y).as_slice(),
                (-(m(&y).transpose() * x)).as_slice(),
            ));
            let lhs = m(&x).transpose() * (x * k);
            p2.add(max_abs(lhs.as_slice()) / (x.norm_squared() * k.abs()).max(1.0));
            p3.add(rel_err(
                (m(&x).transpose() * m(&x)).as_slice(),
                (Matrix3::identity() * x.norm_squared()).as_slice(),
            ));
        }
        out.extend([p1.finish(), p2.finish(), p3.finish()]);
    }

    let mut q = [
        Tally::new("pQ1", "Q(q) ∈ SO(4) for unit q", TOL),
        Tally::new("pQ2", "Q(y)Qᵀ(x) = J(y)Jᵀ(x) + yxᵀ", TOL),
        Tally::new("pQ3", "uᵀQ(y)Qᵀ(x)u = 0 iff yᵀx = 0", TOL),
        Tally::new("pQ4", "Q(Q(x)y) = Q(x)Q(y)", TOL),
        Tally::new("pQ5", "Q(Qᵀ(x)y) = Qᵀ(x)Q(y)", TOL),
        Tally::new("pQ6", "Q([0, w]) is skew", TOL),
        Tally::new("pQ7", "Q(x)y = W(y)x", TOL),
        Tally::new("pQ8", "Q(x)W(y) = W(y)Q(x)", TOL),
        Tally::new("pQ9", "W(Q(x)y) = W(y)W(x)", TOL),
    ];
    for _ in 0..opts.samples {
        let x = random_vector4(&mut rng);
        let y = random_vector4(&mut rng);
        let u = random_vector4(&mut rng);
        let unit = random_unit_quaternion(&mut rng);
        let w = random_vector3(&mut rng);

        let qq = map_q(unit.as_vector());
        let ortho = rel_err((qq.transpose() * qq).as_slice(), Matrix4::<f64>::identity().as_slice());
        q[0].add(ortho.max((qq.determinant() - 1.0).abs()));

        q[1].add(rel_err(
            (map_q(&y) * map_q(&x).transpose()).as_slice(),
            (map_j(&y) * map_j(&x).transpose() + y * x.transpose()).as_slice(),
        ));

        // uᵀQ(y)Qᵀ(x)u = (yᵀx)|u|², and it vanishes for the part of y orthogonal to x
        let scale = (u.norm_squared() * x.norm() * y.norm()).max(1.0);
        let form = |y: &Vector4| (u.transpose() * map_q(y) * map_q(&x).transpose() * u)[0];
        let y_perp = y - x * (y.dot(&x) / x.norm_squared());
        let e_form = (form(&y) - y.dot(&x) * u.norm_squared()).abs() / scale;
        let e_perp = form(&y_perp).abs() / scale;
        q[2].add(e_form.max(e_perp));

        q[3].add(rel_err(
            map_q(&(map_q(&x) * y)).as_slice(),
            (map_q(&x) * map_q(&y)).as_slice(),
        ));
        q[4].add(rel_err(
            map_q(&(map_q(&x).transpose() * y)).as_slice(),
            (map_q(&x).transpose() * map_q(&y)).as_slice(),
        ));
        let qw = map_q(&Vector4::new(0.0, w.x, w.y, w.z));
        q[5].add(max_abs((qw + qw.transpose()).as_slice()) / w.amax().max(1.0));
        q[6].add(rel_err((map_q(&x) * y).as_slice(), (map_w(&y) * x).as_slice()));
        q[7].add(rel_err(
            (map_q(&x) * map_w(&y)).as_slice(),
            (map_w(&y) * map_q(&x)).as_slice(),
        ));
        q[8].add(rel_err(
            map_w(&(map_q(&x) * y)).as_slice(),
            (map_w(&y) * map_w(&x)).as_slice(),
        ));
    }
    out.extend(q.into_iter().map(Tally::finish));
    out
}

fn random_point<R: Rng>(rng: &mut R) -> TangentBundlePoint {
    let q = random_unit_quaternion(rng);
    let p = omega_to_qdot(&q, &random_vector3(rng));
    TangentBundlePoint::new(q, p).expect("tangent by construction")
}

fn point_diff(a: &TangentBundlePoint, b: &TangentBundlePoint) -> f64 {
    (a.q.as_vector() - b.q.as_vector()).amax().max((a.p - b.p).amax())
}

fn group(opts: &VerifyOptions) -> Vec<PropertyReport> {
    const TOL: f64 = 1e-9;
    const CLOSURE_TOL: f64 = 1e-10;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(1));
    let mut out = Vec::new();
    for lam in LAMBDAS {
        let params = GroupParams::new(lam).expect("positive");
        let op = |a: &TangentBundlePoint, b: &TangentBundlePoint| group_op(a, b, &params);
        let e = group_identity();
        let mut identity = Tally::new(format!("identity λ={lam}"), "e·g = g·e = g", TOL);
        let mut inverse = Tally::new(format!("inverse λ={lam}"), "g⁻¹·g = g·g⁻¹ = e", TOL);
        let mut assoc = Tally::new(format!("associativity λ={lam}"), "(a·b)·c = a·(b·c)", TOL);
        let mut closure = Tally::new(
            format!("subgroup λ={lam}"),
            "products and inverses of sliding-subgroup members stay on it",
            CLOSURE_TOL,
        );
        for _ in 0..opts.samples {
            let (a, b, c) = (random_point(&mut rng), random_point(&mut rng), random_point(&mut rng));
            let err = (|| -> Result<[f64; 3], geo_smc_core::liegroup::GroupError> {
                let id = point_diff(&op(&e, &a)?, &a).max(point_diff(&op(&a, &e)?, &a));
                let inv = point_diff(&op(&group_inv(&a), &a)?, &e)
                    .max(point_diff(&op(&a, &group_inv(&a))?, &e));
                let asc = point_diff(&op(&op(&a, &b)?, &c)?, &op(&a, &op(&b, &c)?)?);
                Ok([id, inv, asc])
            })()
            .unwrap_or([f64::INFINITY; 3]);
            identity.add(err[0]);
            inverse.add(err[1]);
            assoc.add(err[2]);

            let ha = project_to_subgroup(&random_unit_quaternion(&mut rng), &params);
            let hb = project_to_subgroup(&random_unit_quaternion(&mut rng), &params);
            let prod = op(&ha, &hb).map_or(f64::INFINITY, |g| sliding_var(&g, &params).norm());
            closure.add(prod.max(sliding_var(&group_inv(&ha), &params).norm()));
        }
        out.extend([identity.finish(), inverse.finish(), assoc.finish(), closure.finish()]);
    }
    out
}

/// Smooth bounded torque used by the propagation checks.
fn sinusoid(t: f64) -> Vector3<f64> {
    Vector3::new(0.3 * (1.1 * t).sin(), -0.2 * (0.7 * t).cos(), 0.25 * (0.3 * t + 0.5).sin())
}

/// `(|Δq|, |Δω|)` between Euler and Lagrangian propagation over `t_end`.
pub fn model_equivalence(params: &RigidBodyParams, initial: &BodyState, t_end: f64, dt: f64) -> (f64, f64) {
    let mut euler = *initial;
    let lag0 = LagrangianState::from(initial);
    let mut lag = LagrangianVector::zeros();
    lag.fixed_rows_mut::<4>(0).copy_from(lag0.q.as_vector());
    lag.fixed_rows_mut::<4>(4).copy_from(&lag0.qdot);
    for k in 0..(t_end / dt).round() as usize {
        let t = k as f64 * dt;
        euler = match rk4_step(&euler, |ts, _| sinusoid(ts), t, dt, params) {
            Ok(s) => s,
            Err(_) => return (f64::INFINITY, f64::INFINITY),
        };
        lag = lagrangian_rk4_step(&lag, |ts, q, _| map_j(q) * sinusoid(ts) * 0.5, t, dt, params);
    }
    let q: Vector4 = lag.fixed_rows::<4>(0).into_owned();
    let qdot: Vector4 = lag.fixed_rows::<4>(4).into_owned();
    let omega = map_j(&q).transpose() * qdot * 2.0;
    ((euler.q.as_vector() - q).norm(), (euler.omega - omega).norm())
}

fn dynamics(opts: &VerifyOptions) -> Vec<PropertyReport> {
    let p = RigidBodyParams::reference();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(2));
    let n = opts.dynamics_samples;

    let mut sym = Tally::new("D symmetric", "D(q) = Dᵀ(q)", 1e-12);
    let mut bounds = Tally::new("D bounds", "λmin(M) ≤ eig D(q) ≤ λmax(M)", 1e-9);
    let mut skew = Tally::new(
        "skew identity",
        "|xᵀ(Ḋ - 2C)x| / (|x|² |q̇| λmax(M)), Ḋ by central differences",
        1e-6,
    );
    let mut rates = Tally::new("rate round trip", "ω = 2Jᵀ(q)q̇ inverts q̇ = ½J(q)ω", 1e-12);
    for _ in 0..n {
        let q = random_unit_quaternion(&mut rng);
        let d = mass_matrix(&q, &p);
        sym.add((d - d.transpose()).amax());
        let eig = d.symmetric_eigenvalues();
        bounds.add((p.lambda_min() - eig.min()).max(eig.max() - p.lambda_max()).max(0.0));

        let omega = random_vector3(&mut rng);
        let qdot = omega_to_qdot(&q, &omega);
        let x = random_vector4(&mut rng);
        let h = 1e-6;
        let v = q.as_vector();
        let d_dot = (mass_matrix_at(&(v + qdot * h), p.inertia(), p.m0())
            - mass_matrix_at(&(v - qdot * h), p.inertia(), p.m0()))
            / (2.0 * h);
        let c = coriolis_matrix(&q, &qdot, &p);
        let form = (x.transpose() * (d_dot - c * 2.0) * x)[0].abs();
        skew.add(form / (x.norm_squared() * qdot.norm() * p.lambda_max()));
        rates.add(qdot_to_omega(&q, &qdot).map_or(f64::INFINITY, |w| (w - omega).amax()));
    }

    let initial = BodyState {
        q: UnitQuaternion::new(0.0, Vector3::new(1.0, 2.0, 3.0)).expect("non-zero"),
        omega: Vector3::new(0.1, -0.2, 0.05),
    };
    let (dq, dw) = model_equivalence(&p, &initial, 10.0, 1e-3);
    let mut eq_q = Tally::new("model equivalence q", "Euler vs Lagrangian attitude over 10 s", 1e-6);
    let mut eq_w = Tally::new("model equivalence ω", "Euler vs Lagrangian body rate over 10 s", 1e-5);
    eq_q.add(dq);
    eq_w.add(dw);

    let mut energy = Tally::new("free-body energy", "relative drift of ½ωᵀMω over 10 s, τ = 0", 1e-8);
    let mut body = BodyState {
        q: UnitQuaternion::identity(),
        omega: Vector3::new(0.4, -0.3, 0.6),
    };
    let e0 = kinetic_energy(&body.omega, &p);
    for k in 0..10_000 {
        body = rk4_step(&body, |_, _| Vector3::zeros(), k as f64 * 1e-3, 1e-3, &p).expect("finite");
    }
    energy.add((kinetic_energy(&body.omega, &p) - e0).abs() / e0);

    let (err_rate, err_dyn) = error_dynamics_checks(&p, &mut rng, (n / 10).max(1));

    vec![
        sym.finish(),
        bounds.finish(),
        skew.finish(),
        rates.finish(),
        eq_q.finish(),
        eq_w.finish(),
        energy.finish(),
        err_rate,
        err_dyn,
    ]
}

/// Finite-difference checks of the error kinematics and the error dynamics
/// along short plant segments under a constant torque.
fn error_dynamics_checks<R: Rng>(p: &RigidBodyParams, rng: &mut R, n: usize) -> (PropertyReport, PropertyReport) {
    let group = GroupParams::new(0.1).expect("positive");
    let desired = ConstantRate::default();
    let mut rate = Tally::new("error rate", "q̇_e matches d/dt Qᵀ(q_d)q", 1e-6);
    let mut dynamics = Tally::new(
        "error dynamics",
        "D(q_e)q̈_e + C(q_e, q̇_e)q̇_e = ½J(q_e)τ_c along the plant",
        1e-6,
    );
    let h = 1e-4;
    for _ in 0..n {
        let t: f64 = rng.gen_range(0.0..100.0);
        let s0 = BodyState {
            q: random_unit_quaternion(rng),
            omega: random_vector3(rng) * 0.5,
        };
        let tau = random_vector3(rng) * 0.5;
        let step = |s: &BodyState, ts: f64| rk4_step(s, |_, _| tau, ts, h, p).expect("finite");
        let s1 = step(&s0, t);
        let s2 = step(&s1, t + h);
        let err = |s: &BodyState, ts: f64| error_state(&LagrangianState::from(s), &desired.sample(ts), &group);
        let (e0, e1, e2) = (err(&s0, t), err(&s1, t + h), err(&s2, t + 2.0 * h));

        let fd_rate = (e2.qe.as_vector() - e0.qe.as_vector()) / (2.0 * h);
        rate.add((fd_rate - e1.qedot).amax());

        let sample = desired.sample(t + h);
        let qeddot = (e2.qedot - e0.qedot) / (2.0 * h);
        let d = error_mass_matrix(&e1.qe, p);
        let c = error_coriolis(&e1.qe, &e1.qedot, &e1.omega_e, &sample, p);
        let tau_c = tau_c_from_tau(&tau, &e1.qe, &sample, p);
        let residual = d * qeddot + c * e1.qedot - map_j(e1.qe.as_vector()) * tau_c * 0.5;
        dynamics.add(residual.amax());
    }
    (rate.finish(), dynamics.finish())
}

/// Reaching-law regulation run from `initial`; returns `(t, ‖s‖, bound)` at
/// every logged step, with the exponential envelope inflated by 0.1 %.
pub fn reaching_envelope(
    params: &RigidBodyParams,
    gains: &GeometricGains,
    initial: &BodyState,
    t_end: f64,
    dt: f64,
    log_every: usize,
) -> Vec<(f64, f64, f64)> {
    let s_of = |st: &BodyState| {
        let l = LagrangianState::from(st);
        sliding_var(&TangentBundlePoint { q: l.q, p: l.qdot }, &gains.group).norm()
    };
    let s0 = s_of(initial);
    let ratio = (params.lambda_max() / params.lambda_min()).sqrt();
    let rate = gains.kr.min_eigenvalue() / params.lambda_max();
    let mut state = *initial;
    let mut out = Vec::new();
    let steps = (t_end / dt).round() as usize;
    for k in 0..=steps {
        let t = k as f64 * dt;
        if k % log_every == 0 {
            out.push((t, s_of(&state), ratio * s0 * (-rate * t).exp() * 1.001));
        }
        if k == steps {
            break;
        }
        let torque = |_: f64, st: &BodyState| {
            reaching_torque(&LagrangianState::from(st), gains, params, SlidingSign::Unsigned)
        };
        state = match rk4_step(&state, torque, t, dt, params) {
            Ok(s) => s,
            Err(_) => {
                out.push((t + dt, f64::INFINITY, 0.0));
                break;
            }
        };
    }
    out
}

/// Starts on the sliding subgroup at `q` and returns the largest one-step
/// increase of `V = 1 - q0` under the reaching law (zero if `V` never rises).
pub fn sliding_decay_violation(
    params: &RigidBodyParams,
    gains: &GeometricGains,
    q: &UnitQuaternion,
    t_end: f64,
    dt: f64,
) -> f64 {
    let g = project_to_subgroup(q, &gains.group);
    let Ok(omega) = qdot_to_omega(&g.q, &g.p) else {
        return f64::INFINITY;
    };
    let mut state = BodyState { q: g.q, omega };
    let mut v = 1.0 - state.q.scalar();
    let mut worst: f64 = 0.0;
    for k in 0..(t_end / dt).round() as usize {
        let torque = |_: f64, st: &BodyState| {
            reaching_torque(&LagrangianState::from(st), gains, params, SlidingSign::Unsigned)
        };
        state = match rk4_step(&state, torque, k as f64 * dt, dt, params) {
            Ok(s) => s,
            Err(_) => return f64::INFINITY,
        };
        let next = 1.0 - state.q.scalar();
        worst = worst.max(next - v);
        v = next;
    }
    worst
}

/// Radius of the excluded ball around `-1`.
pub const ANTIPODE_EXCLUSION: f64 = 1e-3;

fn control(opts: &VerifyOptions) -> Vec<PropertyReport> {
    let p = RigidBodyParams::reference();
    let gains = GeometricGains::default();
    let initial = BodyState {
        q: UnitQuaternion::new(0.0, Vector3::new(1.0, 2.0, 3.0)).expect("non-zero"),
        omega: Vector3::zeros(),
    };

    let mut reach = Tally::new(
        "reaching bound",
        "|s(t)| ≤ 1.001 √(λmax/λmin) |s(0)| exp(-λmin(Kr) t / λmax(M)) at every logged step",
        1.0,
    );
    for (_, s, bound) in reaching_envelope(&p, &gains, &initial, 100.0, 1e-3, 10) {
        reach.add(s / bound);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(3));
    let minus_one = -Vector4::new(1.0, 0.0, 0.0, 0.0);
    let mut starts = Vec::with_capacity(opts.decay_starts);
    while starts.len() < opts.decay_starts {
        let q = random_unit_quaternion(&mut rng);
        if (q.as_vector() - minus_one).norm() > ANTIPODE_EXCLUSION {
            starts.push(q);
        }
    }
    let violations: Vec<f64> = starts
        .par_iter()
        .map(|q| sliding_decay_violation(&p, &gains, q, 30.0, 1e-3))
        .collect();
    let mut decay = Tally::new(
        "sliding decay",
        "V = 1 - q0 never increases after starting on the sliding subgroup",
        0.0,
    );
    for v in violations {
        decay.add(v);
    }
    vec![reach.finish(), decay.finish()]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> VerifyOptions {
        VerifyOptions {
            seed: 3,
            samples: 200,
            dynamics_samples: 50,
            decay_starts: 4,
        }
    }

    #[test]
    fn suites_pass_on_small_samples() {
        for report in run_all(&small()) {
            assert!(report.ok(), "{report}");
            assert!(report.properties.iter().all(|p| p.samples > 0));
        }
    }

    #[test]
    fn unknown_suite() {
        assert!(run_suite("geometry", &small()).is_none());
    }

    #[test]
    fn tally_counts_failures() {
        let mut t = Tally::new("x", "x", 1.0);
        t.add(0.5);
        t.add(2.0);
        t.add(f64::NAN);
        let r = t.finish();
        assert_eq!((r.passed, r.samples), (1, 3));
        assert!(!r.ok());
        assert!(r.max_error.is_nan());
    }
}
