use crate::rng::CounterRng;
use crate::vehicle::{tire_frame_speeds, ControlInput, VehicleParams, VehicleState};

pub const ACCEL_TORQUE_MAX: f64 = 750.0;
pub const BRAKE_TORQUE_MIN: f64 = -1250.0;
pub const STEER_LIMIT: f64 = 0.5;
pub const VX_MIN: f64 = 5.0;
pub const VX_MAX: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Accelerate,
    Decelerate,
}

/// Draws a constant control: a fair coin selects front-wheel acceleration or
/// four-wheel braking, and the steering angle is uniform in either case.
pub fn sample_control(rng: &mut CounterRng) -> (ControlInput, Branch) {
    let branch = sample_branch(rng);
    (sample_control_in_branch(rng, branch), branch)
}

pub fn sample_branch(rng: &mut CounterRng) -> Branch {
    if rng.coin() {
        Branch::Accelerate
    } else {
        Branch::Decelerate
    }
}

pub fn sample_control_in_branch(rng: &mut CounterRng, branch: Branch) -> ControlInput {
    match branch {
        Branch::Accelerate => {
            let t = rng.uniform(0.0, ACCEL_TORQUE_MAX);
            let delta = rng.uniform(-STEER_LIMIT, STEER_LIMIT);
            ControlInput::new([t, t, 0.0, 0.0], delta)
        }
        Branch::Decelerate => {
            let t = rng.uniform(BRAKE_TORQUE_MIN, 0.0);
            let delta = rng.uniform(-STEER_LIMIT, STEER_LIMIT);
            ControlInput::new([t; 4], delta)
        }
    }
}

/// Bounds of the initial lateral speed for a given longitudinal speed.
pub fn lateral_speed_bounds(vx: f64) -> (f64, f64) {
    ((-1.0f64).max(-vx / 3.0), 1.0f64.min(vx / 3.0))
}

/// Wheel spin rates giving zero longitudinal slip on every wheel.
pub fn zero_slip_wheel_speeds(state: &VehicleState, delta: f64, params: &VehicleParams) -> [f64; 4] {
    tire_frame_speeds(state, delta, params).map(|v| v / params.r_eff)
}

/// Draws the initial state; pose, attitude and body rates start at zero.
pub fn sample_initial_state(
    rng: &mut CounterRng,
    control: &ControlInput,
    params: &VehicleParams,
) -> VehicleState {
    let vx = rng.uniform(VX_MIN, VX_MAX);
    let (lo, hi) = lateral_speed_bounds(vx);
    let vy = rng.uniform(lo, hi);
    let mut state = VehicleState {
        vx,
        vy,
        ..Default::default()
    };
    state.omega = zero_slip_wheel_speeds(&state, control.delta, params);
    state
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vehicle::slip_ratio;

    #[test]
    fn control_branches_follow_the_actuation_pattern() {
        let mut rng = CounterRng::new(11);
        let mut accel = 0usize;
        let n = 20_000;
        for _ in 0..n {
            let (u, branch) = sample_control(&mut rng);
            let t = u.torques;
            assert!((-0.5..=0.5).contains(&u.delta));
            match branch {
                Branch::Accelerate => {
                    accel += 1;
                    assert_eq!(t[2], 0.0);
                    assert_eq!(t[3], 0.0);
                    assert_eq!(t[0], t[1]);
                    assert!((0.0..=750.0).contains(&t[0]));
                }
                Branch::Decelerate => {
                    assert!(t.iter().all(|&x| x == t[0]));
                    assert!((-1250.0..=0.0).contains(&t[0]));
                }
            }
        }
        let frac = accel as f64 / n as f64;
        assert!((frac - 0.5).abs() < 0.02, "{frac}");
    }

    #[test]
    fn lateral_bounds_saturate_for_valid_speeds() {
        for k in 0..=350 {
            let vx = 5.0 + k as f64 * 0.1;
            assert_eq!(lateral_speed_bounds(vx), (-1.0, 1.0));
        }
        assert_eq!(lateral_speed_bounds(1.5), (-0.5, 0.5));
    }

    #[test]
    fn zero_slip_at_start() {
        let p = VehicleParams::default();
        let s = VehicleState {
            vx: 12.0,
            ..Default::default()
        };
        let w = zero_slip_wheel_speeds(&s, 0.0, &p);
        for wi in w {
            assert!((wi - 40.0).abs() < 1e-12);
        }

        let mut rng = CounterRng::new(3);
        for _ in 0..1000 {
            let (u, _) = sample_control(&mut rng);
            let s = sample_initial_state(&mut rng, &u, &p);
            assert!((5.0..=40.0).contains(&s.vx));
            assert!((-1.0..=1.0).contains(&s.vy));
            assert_eq!((s.x, s.y, s.psi), (0.0, 0.0, 0.0));
            assert_eq!((s.theta, s.phi, s.psi_dot, s.theta_dot, s.phi_dot), (0.0, 0.0, 0.0, 0.0, 0.0));
            let v = tire_frame_speeds(&s, u.delta, &p);
            for i in 0..4 {
                assert!(slip_ratio(s.omega[i], v[i], p.r_eff).abs() < 1e-14);
            }
        }
    }
}
