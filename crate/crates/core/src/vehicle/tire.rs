//! Slip kinematics, the combined-slip tire law and the tire-to-body force
//! projection.

use super::params::{TireCoeffs, VehicleParams};
use super::state::VehicleState;

/// Speed below which slip denominators are floored (m/s).
pub const EPSILON_V: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TireOutput {
    /// Tire-frame forces (N).
    pub f_xp: f64,
    pub f_yp: f64,
    /// Vehicle-frame forces (N).
    pub f_x: f64,
    pub f_y: f64,
    pub f_z: f64,
    pub tau_x: f64,
    pub alpha: f64,
    pub v_xp: f64,
}

/// Longitudinal slip ratio, traction branch normalized by the wheel speed and
/// braking branch by the ground speed. Clamped to `[-1, 1]`.
pub fn slip_ratio(omega: f64, v_xp: f64, r_eff: f64) -> f64 {
    let wheel_speed = r_eff * omega;
    if wheel_speed.abs() < EPSILON_V && v_xp.abs() < EPSILON_V {
        return 0.0;
    }
    let denom = if wheel_speed >= v_xp {
        wheel_speed.abs()
    } else {
        v_xp.abs()
    };
    ((wheel_speed - v_xp) / denom.max(EPSILON_V)).clamp(-1.0, 1.0)
}

/// Body-frame positions of the wheel centres, ordered fl, fr, rl, rr.
pub fn wheel_positions(params: &VehicleParams) -> [(f64, f64); 4] {
    let (lf, lr, lw) = (params.l_f, params.l_r, params.l_w);
    [(lf, lw), (lf, -lw), (-lr, lw), (-lr, -lw)]
}

/// Body-frame velocity of each wheel centre from rigid-body kinematics.
pub fn wheel_velocities(state: &VehicleState, params: &VehicleParams) -> [(f64, f64); 4] {
    wheel_positions(params).map(|(px, py)| {
        (
            state.vx - state.psi_dot * py,
            state.vy + state.psi_dot * px,
        )
    })
}

/// Steering angle of each wheel; only the front axle steers.
pub fn wheel_steer(delta: f64) -> [f64; 4] {
    [delta, delta, 0.0, 0.0]
}

/// Wheel-centre speed along each tire's rolling direction.
pub fn tire_frame_speeds(state: &VehicleState, delta: f64, params: &VehicleParams) -> [f64; 4] {
    let vel = wheel_velocities(state, params);
    let steer = wheel_steer(delta);
    std::array::from_fn(|i| {
        let (s, c) = steer[i].sin_cos();
        vel[i].0 * c + vel[i].1 * s
    })
}

/// Side-slip angle of each tire: the wheel's heading minus the direction of
/// its velocity. Left wheels see `V_x - l_w psi_dot`, right wheels
/// `V_x + l_w psi_dot`.
pub fn slip_angles(state: &VehicleState, delta: f64, params: &VehicleParams) -> [f64; 4] {
    let vel = wheel_velocities(state, params);
    let steer = wheel_steer(delta);
    std::array::from_fn(|i| steer[i] - (vel[i].1 / vel[i].0.max(EPSILON_V)).atan())
}

#[inline]
fn magic_formula(slip: f64, b: f64, c: f64, d: f64, e: f64) -> f64 {
    let bs = b * slip;
    d * (c * (bs - e * (bs - bs.atan())).atan()).sin()
}

/// Combined-slip tire forces in the tire frame.
///
/// The lateral force carries the sign of `alpha`, which points it against the
/// lateral sliding velocity of the contact patch. The result always lies
/// inside the friction circle of radius `mu * f_z`.
pub fn tire_forces(tau_x: f64, alpha: f64, f_z: f64, mu: f64, c: &TireCoeffs) -> (f64, f64) {
    if f_z <= 0.0 {
        return (0.0, 0.0);
    }
    let d = mu * f_z;
    let fx0 = magic_formula(tau_x, c.b_x, c.c_x, d, c.e_x);
    let fy0 = magic_formula(alpha, c.b_y, c.c_y, d, c.e_y);
    let g_xa = (c.c_xa * (c.b_xa * alpha).atan()).cos();
    let g_yk = (c.c_yk * (c.b_yk * tau_x).atan()).cos();
    let (fx, fy) = (fx0 * g_xa, fy0 * g_yk);
    let norm = fx.hypot(fy);
    if norm > d {
        let k = d / norm;
        (fx * k, fy * k)
    } else {
        (fx, fy)
    }
}

/// Projects tire-frame forces into the vehicle frame, including the normal
/// force components picked up through roll and pitch.
pub fn forces_to_vehicle_frame(
    f_xp: f64,
    f_yp: f64,
    f_z: f64,
    delta: f64,
    theta: f64,
    phi: f64,
) -> (f64, f64) {
    let (sd, cd) = delta.sin_cos();
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let along = f_xp * cd - f_yp * sd;
    let across = f_yp * cd + f_xp * sd;
    let f_x = along * cp - f_z * sp;
    let f_y = along * st * sp + across * ct + f_z * st * cp;
    (f_x, f_y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slip_ratio_examples() {
        assert!(slip_ratio(10.0 / 0.3, 10.0, 0.3).abs() < 1e-12);
        assert!((slip_ratio(35.0, 10.0, 0.3) - 0.5 / 10.5).abs() < 1e-12);
        assert!((slip_ratio(35.0, 10.0, 0.3) - 0.047619).abs() < 1e-6);
        assert_eq!(slip_ratio(0.0, 10.0, 0.3), -1.0);
    }

    #[test]
    fn slip_ratio_degenerate_and_clamped() {
        assert_eq!(slip_ratio(0.0, 0.0, 0.3), 0.0);
        assert_eq!(slip_ratio(1.0, 0.1, 0.3), 0.0);
        assert_eq!(slip_ratio(-100.0, 10.0, 0.3), -1.0);
        // wheel spinning with the car nearly stopped: floored denominator
        let t = slip_ratio(100.0, 0.1, 0.3);
        assert!(t.is_finite() && t <= 1.0 && t > 0.9);
        for &(w, v) in &[(1e-9, 1e-9), (0.0, 0.49), (-1.0, 0.2)] {
            assert!(slip_ratio(w, v, 0.3).is_finite());
        }
    }

    #[test]
    fn slip_angle_examples() {
        let p = VehicleParams::default();
        let mut s = VehicleState {
            vx: 10.0,
            ..Default::default()
        };
        assert_eq!(slip_angles(&s, 0.0, &p), [0.0; 4]);
        assert_eq!(slip_angles(&s, 0.1, &p), [0.1, 0.1, 0.0, 0.0]);

        s.vy = 0.5;
        s.psi_dot = 0.2;
        let a = slip_angles(&s, 0.0, &p);
        assert!((a[0] - (-(0.74f64 / 9.84).atan())).abs() < 1e-12);
        assert!((a[1] - (-(0.74f64 / 10.16).atan())).abs() < 1e-12);
        assert!((a[2] - (-(0.5f64 - 1.4 * 0.2) / 9.84).atan()).abs() < 1e-12);
        assert!((a[3] - (-(0.5f64 - 1.4 * 0.2) / 10.16).atan()).abs() < 1e-12);
    }

    #[test]
    fn tire_force_examples() {
        let c = TireCoeffs::default();
        assert_eq!(tire_forces(0.0, 0.0, 4000.0, 1.0, &c), (0.0, 0.0));
        let (fx, fy) = tire_forces(0.5, 0.3, 4000.0, 1.0, &c);
        assert!(fx.hypot(fy) <= 4000.0 + 1e-9);
        assert_eq!(tire_forces(0.2, 0.1, 0.0, 1.0, &c), (0.0, 0.0));
        assert_eq!(tire_forces(0.2, 0.1, -5.0, 1.0, &c), (0.0, 0.0));
    }

    #[test]
    fn tire_force_signs_near_zero() {
        let c = TireCoeffs::default();
        let fx = |t| tire_forces(t, 0.0, 4000.0, 1.0, &c).0;
        let mut prev = fx(-0.05);
        for k in -49..=50 {
            let cur = fx(k as f64 * 1e-3);
            assert!(cur > prev);
            prev = cur;
        }
        // lateral force follows the slip angle, opposing the patch's sliding
        // velocity (alpha > 0 means the wheel velocity points right of the wheel)
        assert!(tire_forces(0.0, 0.01, 4000.0, 1.0, &c).1 > 0.0);
        assert!(tire_forces(0.0, -0.01, 4000.0, 1.0, &c).1 < 0.0);
    }

    #[test]
    fn peak_longitudinal_force_matches_friction_limit() {
        // Brute-force maximization over a 200 x 200 slip grid.
        let c = TireCoeffs::default();
        let fz = 4000.0;
        let mut peak = 0.0f64;
        for i in 0..200 {
            let tau = -1.0 + 2.0 * i as f64 / 199.0;
            for j in 0..200 {
                let alpha = -0.5 + j as f64 / 199.0;
                peak = peak.max(tire_forces(tau, alpha, fz, 1.0, &c).0.abs());
            }
        }
        assert!((peak - fz).abs() <= 0.02 * fz, "peak {peak}");
    }

    #[test]
    fn projection_examples() {
        assert_eq!(
            forces_to_vehicle_frame(1234.0, -321.0, 4000.0, 0.0, 0.0, 0.0),
            (1234.0, -321.0)
        );
        let (fx, fy) = forces_to_vehicle_frame(1000.0, 0.0, 0.0, 0.5, 0.0, 0.0);
        assert!((fx - 1000.0 * 0.5f64.cos()).abs() < 1e-9);
        assert!((fy - 1000.0 * 0.5f64.sin()).abs() < 1e-9);
        let (fx, fy) = forces_to_vehicle_frame(0.0, 0.0, 4000.0, 0.0, 0.0, 0.1);
        assert!((fx + 4000.0 * 0.1f64.sin()).abs() < 1e-9);
        assert_eq!(fy, 0.0);
    }
}
