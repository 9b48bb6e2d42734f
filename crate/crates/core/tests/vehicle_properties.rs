use proptest::prelude::*;
use vdl_core::rng::CounterRng;
use vdl_core::vehicle::{
    derivatives, kinetic_energy, rk4_step, simulate_rollout, simulate_rollout_with_step,
    tire_forces, ControlInput, TireCoeffs, VehicleParams, VehicleState,
};

fn rolling(vx: f64, p: &VehicleParams) -> VehicleState {
    VehicleState {
        vx,
        omega: [vx / p.r_eff; 4],
        ..Default::default()
    }
}

#[test]
fn friction_circle_holds_on_random_samples() {
    let c = TireCoeffs::default();
    let mut rng = CounterRng::new(2024);
    for _ in 0..10_000 {
        let tau = rng.uniform(-1.0, 1.0);
        let alpha = rng.uniform(-1.5, 1.5);
        let fz = rng.uniform(0.0, 12_000.0);
        let mu = rng.uniform(0.05, 2.0);
        let (fx, fy) = tire_forces(tau, alpha, fz, mu, &c);
        assert!(fx.hypot(fy) <= mu * fz + 1e-9, "{tau} {alpha} {fz} {mu}");
    }
}

fn mirror(s: &VehicleState) -> VehicleState {
    VehicleState {
        vy: -s.vy,
        psi_dot: -s.psi_dot,
        theta: -s.theta,
        theta_dot: -s.theta_dot,
        omega: [s.omega[1], s.omega[0], s.omega[3], s.omega[2]],
        ..*s
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #[test]
    fn left_right_mirror_symmetry(
        vx in 3.0f64..40.0,
        vy in -2.0f64..2.0,
        psi_dot in -1.0f64..1.0,
        theta in -0.05f64..0.05,
        phi in -0.05f64..0.05,
        theta_dot in -0.5f64..0.5,
        phi_dot in -0.5f64..0.5,
        slips in prop::array::uniform4(-0.2f64..0.2),
        torques in prop::array::uniform4(-1000.0f64..800.0),
        delta in -0.5f64..0.5,
    ) {
        let p = VehicleParams::default();
        let mut s = VehicleState { vx, vy, psi_dot, theta, phi, theta_dot, phi_dot, ..Default::default() };
        s.omega = std::array::from_fn(|i| vx * (1.0 + slips[i]) / p.r_eff);
        let u = ControlInput::new(torques, delta);
        let um = ControlInput::new([torques[1], torques[0], torques[3], torques[2]], -delta);
        let d = derivatives(&s, &u, &p).unwrap();
        let dm = derivatives(&mirror(&s), &um, &p).unwrap();
        prop_assert!(close(d.vy_dot, -dm.vy_dot));
        prop_assert!(close(d.psi_ddot, -dm.psi_ddot));
        prop_assert!(close(d.theta_ddot, -dm.theta_ddot));
        prop_assert!(close(d.vx_dot, dm.vx_dot));
        prop_assert!(close(d.phi_ddot, dm.phi_ddot));
    }
}

#[test]
fn straight_line_stays_straight() {
    let p = VehicleParams::default();
    for (vx, t) in [(10.0, 400.0), (25.0, -900.0), (35.0, 0.0)] {
        let u = ControlInput::new([t, t, t.min(0.0), t.min(0.0)], 0.0);
        let r = simulate_rollout(&rolling(vx, &p), &u, 3.0, 0.01, &p).unwrap();
        assert_eq!(r.len(), 301);
        for s in &r.states {
            assert!(s.y.abs() < 1e-9);
        }
    }
}

#[test]
fn coast_down_is_monotonic() {
    let p = VehicleParams::default();
    let r = simulate_rollout(&rolling(20.0, &p), &ControlInput::default(), 3.0, 0.01, &p).unwrap();
    for w in r.states.windows(2) {
        assert!(w[1].vx < w[0].vx);
    }
}

#[test]
fn rolling_without_drag_is_a_fixed_point() {
    let p = VehicleParams {
        c_x: 0.0,
        ..VehicleParams::default()
    };
    let s0 = rolling(17.0, &p);
    let r = simulate_rollout(&s0, &ControlInput::default(), 1.0, 0.01, &p).unwrap();
    let last = r.states.last().unwrap();
    assert!((last.vx - s0.vx).abs() < 1e-9);
    assert!(last.vy.abs() < 1e-9);
    assert!(last.psi_dot.abs() < 1e-9);
    assert!((last.x - 17.0).abs() < 1e-9);
}

fn endpoint(dt: f64) -> (f64, f64) {
    let p = VehicleParams::default();
    let u = ControlInput::new([250.0, 250.0, 0.0, 0.0], 0.05);
    let r = simulate_rollout_with_step(&rolling(20.0, &p), &u, 3.0, 0.024, dt, &p).unwrap();
    let s = r.states.last().unwrap();
    (s.x, s.y)
}

#[test]
fn rk4_converges_at_fourth_order() {
    let a = endpoint(0.001);
    let b = endpoint(0.0005);
    let c = endpoint(0.00025);
    let e1 = (a.0 - b.0).hypot(a.1 - b.1);
    let e2 = (b.0 - c.0).hypot(b.1 - c.1);
    let ratio = e1 / e2;
    assert!((12.0..=20.0).contains(&ratio), "ratio {ratio} ({e1:e} / {e2:e})");
}

#[test]
fn kinetic_energy_never_grows_without_torque() {
    let p = VehicleParams::default();
    let mut rng = CounterRng::new(77);
    for _ in 0..20 {
        let vx = rng.uniform(5.0, 40.0);
        let mut s = rolling(vx, &p);
        s.vy = rng.uniform(-1.0, 1.0);
        let u = ControlInput::new([0.0; 4], rng.uniform(-0.5, 0.5));
        let mut e = kinetic_energy(&s, &p);
        for _ in 0..3000 {
            s = rk4_step(&s, &u, &p, 1e-3);
            if s.vx < 0.5 {
                break;
            }
            let e_next = kinetic_energy(&s, &p);
            assert!(e_next <= e * (1.0 + 1e-12), "energy grew: {e} -> {e_next} ({u:?})");
            e = e_next;
        }
    }
}
