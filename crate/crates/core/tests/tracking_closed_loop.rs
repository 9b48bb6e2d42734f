use proptest::prelude::*;

use vdl_core::baselines::{pure_pursuit, stanley, BaselineConfig, BaselineController, LateralGains, LateralLaw};
use vdl_core::dataset::zero_slip_wheel_speeds;
use vdl_core::nn::{init_model, Architecture, CnnSpec, InverseModel, Normalization};
use vdl_core::tracking::{
    build_bezier_query, closed_loop_simulate, ClosedLoopConfig, Controller, NnController, NnControllerConfig,
    Observation, ReferencePath, QUERY_HORIZON, QUERY_SAMPLES,
};
use vdl_core::vehicle::{simulate_rollout, ControlInput, VehicleParams, VehicleState};

struct Replay(ControlInput);

impl Controller for Replay {
    fn name(&self) -> String {
        "replay".into()
    }
    fn period(&self) -> f64 {
        0.01
    }
    fn control(&mut self, _obs: &Observation<'_>) -> vdl_core::Result<ControlInput> {
        Ok(self.0)
    }
}

#[test]
fn replaying_a_feasible_rollout_tracks_it() {
    let params = VehicleParams::default();
    let u = ControlInput::new([180.0, 180.0, 0.0, 0.0], 0.06);
    let mut xi0 = VehicleState {
        vx: 10.0,
        ..VehicleState::default()
    };
    xi0.omega = zero_slip_wheel_speeds(&xi0, u.delta, &params);
    let rollout = simulate_rollout(&xi0, &u, 3.0, 0.01, &params).unwrap();
    let path = ReferencePath::from_points(&rollout.positions(), 10.0).unwrap();
    let cfg = ClosedLoopConfig {
        initial_state: Some(xi0),
        max_duration: 2.95,
        ..ClosedLoopConfig::default()
    };
    let run = closed_loop_simulate(&mut Replay(u), &path, &cfg, &params).unwrap();
    assert!(run.divergence.is_none(), "{:?}", run.divergence);
    assert!(run.trace.len() > 250);
    assert!(run.metrics.lateral.rms < 0.05, "rms {}", run.metrics.lateral.rms);
}

#[test]
fn baselines_complete_the_default_track_deterministically() {
    let params = VehicleParams::default();
    let path = ReferencePath::default_track();
    for law in [LateralLaw::PurePursuit, LateralLaw::Stanley] {
        let run = |_: ()| {
            let mut c = BaselineController::new(law, BaselineConfig::default(), params);
            closed_loop_simulate(&mut c, &path, &ClosedLoopConfig::default(), &params).unwrap()
        };
        let a = run(());
        assert!(a.completed && a.divergence.is_none(), "{law:?}: {:?}", a.divergence);
        assert!(a.trace.iter().all(|r| r.control.delta.abs() <= 0.5));
        let m = &a.metrics;
        assert!(m.lateral.rms.powi(2) - m.lateral.mean.powi(2) - m.lateral.std.powi(2) < 1e-9);
        assert!(m.lateral.max.abs() >= m.lateral.rms);
        let b = run(());
        assert_eq!(a, b);
    }
}

#[test]
fn pure_pursuit_steers_towards_a_goal_on_the_left() {
    let params = VehicleParams::default();
    let gains = LateralGains::default();
    let path = ReferencePath::from_points(&[(-params.l_r, 0.0), (-params.l_r, 100.0)], 10.0).unwrap();
    let state = VehicleState {
        vx: 10.0,
        ..VehicleState::default()
    };
    let d = pure_pursuit(&state, &path, 0.0, &params, &gains).unwrap();
    let lp = params.l_f + 15.0;
    assert!((d - (params.wheelbase() * 2.0 / lp).atan()).abs() < 1e-12);
    assert!(d > 0.0);
}

fn state_on_straight(path: &ReferencePath, s: f64, v: f64) -> VehicleState {
    let p = path.point_at(s);
    VehicleState {
        x: p.x,
        y: p.y,
        psi: p.heading,
        vx: v,
        ..VehicleState::default()
    }
}

proptest! {
    #[test]
    fn steering_laws_are_silent_on_path(s in 0.0..100.0f64, v in 1.0..30.0f64) {
        let params = VehicleParams::default();
        let gains = LateralGains::default();
        let path = ReferencePath::default_track();
        let st = state_on_straight(&path, s, v);
        prop_assert_eq!(pure_pursuit(&st, &path, s, &params, &gains).unwrap(), 0.0);
        prop_assert!(stanley(&st, &path, s, &params, &gains).unwrap().abs() < 1e-12);
    }

    #[test]
    fn steering_stays_clamped(s in 0.0..550.0f64, off in -8.0..8.0f64, dpsi in -1.5..1.5f64, v in 1.0..30.0f64) {
        let params = VehicleParams::default();
        let gains = LateralGains::default();
        let path = ReferencePath::default_track();
        let p = path.point_at(s);
        let st = VehicleState {
            x: p.x - off * p.heading.sin(),
            y: p.y + off * p.heading.cos(),
            psi: p.heading + dpsi,
            vx: v,
            ..VehicleState::default()
        };
        prop_assert!(pure_pursuit(&st, &path, s, &params, &gains).unwrap().abs() <= 0.5);
        prop_assert!(stanley(&st, &path, s, &params, &gains).unwrap().abs() <= 0.5);
    }

    #[test]
    fn queries_start_at_origin_and_end_on_path(s in 0.0..560.0f64, off in -3.0..3.0f64, dpsi in -0.3..0.3f64) {
        let path = ReferencePath::default_track();
        let p = path.point_at(s);
        let st = VehicleState {
            x: p.x - off * p.heading.sin(),
            y: p.y + off * p.heading.cos(),
            psi: p.heading + dpsi,
            vx: 10.0,
            ..VehicleState::default()
        };
        let q = build_bezier_query(&st, &path, s, QUERY_HORIZON, QUERY_SAMPLES);
        prop_assert_eq!(q.body.len(), 301);
        prop_assert_eq!(q.body[0], (0.0, 0.0));
        let end = path.point_at(s + 30.0);
        prop_assert!((q.world[300].0 - end.x).abs() < 1e-9 && (q.world[300].1 - end.y).abs() < 1e-9);
    }
}

fn random_nn(seed: u64) -> NnController {
    let params = VehicleParams::default();
    let model = init_model(Architecture::Cnn(CnnSpec::paper_default()), seed);
    NnController::new(
        "cnn",
        InverseModel {
            model,
            normalization: Normalization::for_params(&params),
        },
        NnControllerConfig::default(),
    )
}

#[test]
fn nn_controller_holds_and_clamps() {
    let params = VehicleParams::default();
    let path = ReferencePath::default_track();
    let cfg = ClosedLoopConfig {
        max_duration: 2.0,
        ..ClosedLoopConfig::default()
    };
    let mut ctrl = random_nn(3);
    let a = closed_loop_simulate(&mut ctrl, &path, &cfg, &params).unwrap();
    let b = closed_loop_simulate(&mut random_nn(3), &path, &cfg, &params).unwrap();
    assert_eq!(a.trace, b.trace);
    assert_eq!(a.final_state, b.final_state);
    for w in a.trace.windows(2) {
        if w[1].control != w[0].control {
            let k = (w[1].t / 0.3).round();
            assert!((w[1].t - 0.3 * k).abs() < 1e-9, "control changed at t = {}", w[1].t);
        }
        assert!(w[1].control.delta.abs() <= 0.5);
    }

    let st = vdl_core::tracking::start_state(&path, &params);
    assert_eq!(ctrl.query(&st, &path, 0.0).unwrap(), ctrl.query(&st, &path, 0.0).unwrap());
    let wide = ctrl.clamp(ControlInput::new([5000.0, -5000.0, 1.0, 2.0], 0.9));
    assert_eq!(wide.delta, 0.5);
    assert_eq!(wide.torques[0], 5000.0);
    ctrl.config.torque_limit = Some(2000.0);
    let clamped = ctrl.clamp(ControlInput::new([5000.0, -5000.0, 1.0, 2.0], -0.9));
    assert_eq!(clamped.torques, [2000.0, -2000.0, 1.0, 2.0]);
    assert_eq!(clamped.delta, -0.5);
}

#[test]
fn bad_periods_are_rejected() {
    let params = VehicleParams::default();
    let path = ReferencePath::default_track();
    let mut c = BaselineController::new(
        LateralLaw::Stanley,
        BaselineConfig {
            period: 0.0105,
            ..BaselineConfig::default()
        },
        params,
    );
    assert!(closed_loop_simulate(&mut c, &path, &ClosedLoopConfig::default(), &params).is_err());
}
