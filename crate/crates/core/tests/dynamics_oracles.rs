//! Cross-model and finite-difference oracles for the dynamics.

use geo_smc_core::dynamics::{
    bar_tau_to_tau, coriolis_matrix, error_coriolis, error_mass_matrix, error_state,
    kinetic_energy, mass_matrix, mass_matrix_at, omega_to_qdot, tau_c_from_tau, tau_to_bar_tau,
    BodyState, ConstantRate, DesiredTrajectory, LagrangianState, RigidBodyParams,
};
use geo_smc_core::liegroup::GroupParams;
use geo_smc_core::quat::{map_j, random_unit_quaternion, random_vector3, random_vector4};
use geo_smc_core::sim::{lagrangian_rk4_step, rk4_step, LagrangianVector};
use geo_smc_core::UnitQuaternion;
use nalgebra::{Matrix3, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const DT: f64 = 1e-3;

fn sinusoid(t: f64) -> Vector3<f64> {
    Vector3::new(0.3 * (1.1 * t).sin(), -0.2 * (0.7 * t).cos(), 0.25 * (0.3 * t + 0.5).sin())
}

fn pack(s: &BodyState) -> LagrangianVector {
    let l = LagrangianState::from(s);
    let mut x = LagrangianVector::zeros();
    x.fixed_rows_mut::<4>(0).copy_from(l.q.as_vector());
    x.fixed_rows_mut::<4>(4).copy_from(&l.qdot);
    x
}

#[test]
fn euler_and_lagrangian_forms_agree() {
    let p = RigidBodyParams::reference();
    let mut euler = BodyState {
        q: UnitQuaternion::new(0.0, Vector3::new(1.0, 2.0, 3.0)).unwrap(),
        omega: Vector3::new(0.1, -0.2, 0.05),
    };
    let mut lag = pack(&euler);
    let steps = (10.0 / DT) as usize;
    for k in 0..steps {
        let t = k as f64 * DT;
        euler = rk4_step(&euler, |ts, _| sinusoid(ts), t, DT, &p).unwrap();
        lag = lagrangian_rk4_step(
            &lag,
            |ts, q, _| map_j(q) * sinusoid(ts) * 0.5,
            t,
            DT,
            &p,
        );
    }
    let q_lag = lag.fixed_rows::<4>(0).into_owned();
    let qdot_lag = lag.fixed_rows::<4>(4).into_owned();
    let omega_lag = map_j(&q_lag).transpose() * qdot_lag * 2.0;
    let dq = (euler.q.as_vector() - q_lag).norm();
    let dw = (euler.omega - omega_lag).norm();
    assert!(dq <= 1e-6, "attitude mismatch {dq:e}");
    assert!(dw <= 1e-5, "rate mismatch {dw:e}");
}

#[test]
fn free_body_conserves_energy() {
    let p = RigidBodyParams::reference();
    let mut s = BodyState {
        q: UnitQuaternion::identity(),
        omega: Vector3::new(0.4, -0.3, 0.6),
    };
    let e0 = kinetic_energy(&s.omega, &p);
    for k in 0..(10.0 / DT) as usize {
        s = rk4_step(&s, |_, _| Vector3::zeros(), k as f64 * DT, DT, &p).unwrap();
    }
    let rel = (kinetic_energy(&s.omega, &p) - e0).abs() / e0;
    assert!(rel < 1e-8, "relative drift {rel:e}");
}

#[test]
fn isotropic_lagrangian_keeps_rate_magnitude() {
    let p = RigidBodyParams::new(Matrix3::identity(), 1.0).unwrap();
    let s = BodyState {
        q: UnitQuaternion::try_from([0.3, -0.1, 0.9, 0.2]).unwrap(),
        omega: Vector3::new(0.5, 0.2, -0.7),
    };
    let mut x = pack(&s);
    for k in 0..(10.0 / DT) as usize {
        x = lagrangian_rk4_step(&x, |_, _, _| Default::default(), k as f64 * DT, DT, &p);
    }
    let q = x.fixed_rows::<4>(0).into_owned();
    let qdot = x.fixed_rows::<4>(4).into_owned();
    let omega = map_j(&q).transpose() * qdot * 2.0;
    assert!((omega.norm() - s.omega.norm()).abs() < 1e-6);
}

#[test]
fn skew_identity_with_finite_difference_d() {
    let p = RigidBodyParams::reference();
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let h = 1e-6;
    for _ in 0..1000 {
        let q = random_unit_quaternion(&mut rng);
        let qdot = omega_to_qdot(&q, &random_vector3(&mut rng));
        let x = random_vector4(&mut rng);
        let v = q.as_vector();
        let d_dot = (mass_matrix_at(&(v + qdot * h), p.inertia(), p.m0())
            - mass_matrix_at(&(v - qdot * h), p.inertia(), p.m0()))
            / (2.0 * h);
        let c = coriolis_matrix(&q, &qdot, &p);
        let lhs = (x.transpose() * (d_dot - c * 2.0) * x)[0].abs();
        let bound = 1e-6 * x.norm_squared() * qdot.norm() * p.lambda_max();
        assert!(lhs <= bound, "{lhs:e} > {bound:e}");
    }
}

#[test]
fn error_rate_matches_finite_difference() {
    let p = RigidBodyParams::reference();
    let desired = ConstantRate::default();
    let group = GroupParams::new(0.1).unwrap();
    let mut s = BodyState {
        q: UnitQuaternion::try_from([0.2, 0.5, -0.4, 0.7]).unwrap(),
        omega: Vector3::new(0.2, 0.1, -0.3),
    };
    let h = 1e-5;
    let mut t = 0.0;
    for _ in 0..5 {
        let err = |st: &BodyState, tt: f64| {
            error_state(&LagrangianState::from(st), &desired.sample(tt), &group)
        };
        let fwd = rk4_step(&s, |ts, _| sinusoid(ts), t, h, &p).unwrap();
        // central difference about t + h
        let fwd2 = rk4_step(&fwd, |ts, _| sinusoid(ts), t + h, h, &p).unwrap();
        let fd = (err(&fwd2, t + 2.0 * h).qe.as_vector() - err(&s, t).qe.as_vector()) / (2.0 * h);
        let mid = err(&fwd, t + h).qedot;
        assert!((fd - mid).amax() < 1e-6, "{:e}", (fd - mid).amax());
        for k in 0..500 {
            s = rk4_step(&s, |ts, _| sinusoid(ts), t + k as f64 * DT, DT, &p).unwrap();
        }
        t += 0.5;
    }
}

#[test]
fn error_dynamics_hold_along_the_plant() {
    // D(q_e) q̈_e + C(q_e, q̇_e) q̇_e = ½ J(q_e) τ_c along any plant trajectory.
    let p = RigidBodyParams::reference();
    let desired = ConstantRate::default();
    let group = GroupParams::new(0.1).unwrap();
    let mut s = BodyState {
        q: UnitQuaternion::new(0.0, Vector3::new(1.0, 2.0, 3.0)).unwrap(),
        omega: Vector3::new(0.05, 0.1, -0.2),
    };
    let h = 1e-4;
    let err_at = |st: &BodyState, t: f64| {
        error_state(&LagrangianState::from(st), &desired.sample(t), &group)
    };
    let mut t = 0.0;
    for _ in 0..10 {
        let prev = err_at(&s, t);
        let mid_state = rk4_step(&s, |ts, _| sinusoid(ts), t, h, &p).unwrap();
        let next_state = rk4_step(&mid_state, |ts, _| sinusoid(ts), t + h, h, &p).unwrap();
        let mid = err_at(&mid_state, t + h);
        let next = err_at(&next_state, t + 2.0 * h);
        let qeddot = (next.qedot - prev.qedot) / (2.0 * h);

        let sample = desired.sample(t + h);
        let d = error_mass_matrix(&mid.qe, &p);
        let c = error_coriolis(&mid.qe, &mid.qedot, &mid.omega_e, &sample, &p);
        let tau_c = tau_c_from_tau(&sinusoid(t + h), &mid.qe, &sample, &p);
        let lhs = d * qeddot + c * mid.qedot;
        let rhs = map_j(mid.qe.as_vector()) * tau_c * 0.5;
        assert!((lhs - rhs).amax() < 1e-6, "residual {:e}", (lhs - rhs).amax());

        for k in 0..1000 {
            s = rk4_step(&s, |ts, _| sinusoid(ts), t + k as f64 * DT, DT, &p).unwrap();
        }
        t += 1.0;
    }
}

#[test]
fn torque_maps_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..1000 {
        let q = random_unit_quaternion(&mut rng);
        let tau = random_vector3(&mut rng);
        let back = bar_tau_to_tau(&q, &tau_to_bar_tau(&q, &tau));
        assert!((back - tau).amax() < 1e-12);
    }
}

#[test]
fn mass_matrix_eigenvalues_are_bracketed() {
    let p = RigidBodyParams::reference();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..1000 {
        let q = random_unit_quaternion(&mut rng);
        let d = mass_matrix(&q, &p);
        assert!((d - d.transpose()).amax() < 1e-12);
        let eig = d.symmetric_eigenvalues();
        assert!(eig.min() >= p.lambda_min() - 1e-9);
        assert!(eig.max() <= p.lambda_max() + 1e-9);
    }
}
