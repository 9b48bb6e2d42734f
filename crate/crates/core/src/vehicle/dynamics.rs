use super::params::VehicleParams;
use super::state::{ControlInput, StateDerivative, VehicleState, STATE_DIM};
use super::tire::{
    forces_to_vehicle_frame, slip_angles, slip_ratio, tire_forces, tire_frame_speeds,
    wheel_steer, TireOutput,
};
use crate::error::{Error, Result};

/// Suspension travel of each corner (positive = extension, unloading).
pub fn suspension_travel(theta: f64, phi: f64, params: &VehicleParams) -> [f64; 4] {
    let roll = params.l_w * theta.sin();
    let sp = phi.sin();
    [
        roll - params.l_f * sp,
        -roll - params.l_f * sp,
        roll + params.l_r * sp,
        -roll + params.l_r * sp,
    ]
}

fn suspension_travel_rate(
    theta: f64,
    phi: f64,
    theta_dot: f64,
    phi_dot: f64,
    params: &VehicleParams,
) -> [f64; 4] {
    let roll = params.l_w * theta.cos() * theta_dot;
    let pitch = phi.cos() * phi_dot;
    [
        roll - params.l_f * pitch,
        -roll - params.l_f * pitch,
        roll + params.l_r * pitch,
        -roll + params.l_r * pitch,
    ]
}

/// Normal loads: static weight split plus the spring-damper reaction to roll
/// and pitch. A wheel that lifts off carries zero load.
pub fn suspension_normal_forces(
    theta: f64,
    phi: f64,
    theta_dot: f64,
    phi_dot: f64,
    params: &VehicleParams,
) -> [f64; 4] {
    let stat = params.static_loads();
    let zeta = suspension_travel(theta, phi, params);
    let zeta_dot = suspension_travel_rate(theta, phi, theta_dot, phi_dot, params);
    std::array::from_fn(|i| (stat[i] - params.k_s * zeta[i] - params.d_s * zeta_dot[i]).max(0.0))
}

pub fn aero_drag(vx: f64, params: &VehicleParams) -> f64 {
    0.5 * params.rho_air * params.c_x * params.frontal_area * vx * vx
}

/// Evaluates the full model: tire states and the state derivative.
pub fn evaluate(
    state: &VehicleState,
    control: &ControlInput,
    params: &VehicleParams,
) -> (StateDerivative, [TireOutput; 4]) {
    let f_z = suspension_normal_forces(
        state.theta,
        state.phi,
        state.theta_dot,
        state.phi_dot,
        params,
    );
    let v_xp = tire_frame_speeds(state, control.delta, params);
    let alpha = slip_angles(state, control.delta, params);
    let steer = wheel_steer(control.delta);

    let tires: [TireOutput; 4] = std::array::from_fn(|i| {
        let tau_x = slip_ratio(state.omega[i], v_xp[i], params.r_eff);
        let (f_xp, f_yp) = tire_forces(tau_x, alpha[i], f_z[i], params.mu, &params.tire);
        let (f_x, f_y) =
            forces_to_vehicle_frame(f_xp, f_yp, f_z[i], steer[i], state.theta, state.phi);
        TireOutput {
            f_xp,
            f_yp,
            f_x,
            f_y,
            f_z: f_z[i],
            tau_x,
            alpha: alpha[i],
            v_xp: v_xp[i],
        }
    });

    let fx: [f64; 4] = tires.map(|t| t.f_x);
    let fy: [f64; 4] = tires.map(|t| t.f_y);
    let sum_fx = fx.iter().sum::<f64>();
    let sum_fy = fy.iter().sum::<f64>();
    let p = params;

    let vx_dot = state.psi_dot * state.vy + (sum_fx - aero_drag(state.vx, p)) / p.m_t;
    let vy_dot = -state.psi_dot * state.vx + sum_fy / p.m_t;
    let theta_ddot = (p.l_w * (f_z[0] + f_z[2] - f_z[1] - f_z[3]) + p.h * sum_fy) / p.i_x;
    let phi_ddot = (p.l_r * (f_z[2] + f_z[3]) - p.l_f * (f_z[0] + f_z[1]) - p.h * sum_fx) / p.i_y;
    let psi_ddot = (p.l_f * (fy[0] + fy[1]) - p.l_r * (fy[2] + fy[3])
        + p.l_w * (fx[1] + fx[3] - fx[0] - fx[2]))
        / p.i_z;
    let (x_dot, y_dot) = state.ground_velocity();
    let omega_dot =
        std::array::from_fn(|i| (control.torques[i] - p.r_eff * tires[i].f_xp) / p.i_r);

    let deriv = StateDerivative {
        x_dot,
        y_dot,
        psi_dot: state.psi_dot,
        theta_dot: state.theta_dot,
        phi_dot: state.phi_dot,
        vx_dot,
        vy_dot,
        psi_ddot,
        theta_ddot,
        phi_ddot,
        omega_dot,
    };
    (deriv, tires)
}

/// State derivative; a non-finite result is reported as an error.
pub fn derivatives(
    state: &VehicleState,
    control: &ControlInput,
    params: &VehicleParams,
) -> Result<StateDerivative> {
    let (d, _) = evaluate(state, control, params);
    if d.is_finite() {
        Ok(d)
    } else {
        Err(Error::NonFinite {
            time: f64::NAN,
            detail: format!("state {state:?}, control {control:?}"),
        })
    }
}

#[inline]
pub(crate) fn derivative_array(
    y: &[f64; STATE_DIM],
    control: &ControlInput,
    params: &VehicleParams,
) -> [f64; STATE_DIM] {
    evaluate(&VehicleState::from_array(y), control, params)
        .0
        .to_array()
}

/// Kinetic energy of body translation, body rotation and wheel spin (J).
pub fn kinetic_energy(state: &VehicleState, params: &VehicleParams) -> f64 {
    let p = params;
    0.5 * p.m_t * (state.vx * state.vx + state.vy * state.vy)
        + 0.5 * p.i_z * state.psi_dot * state.psi_dot
        + 0.5 * p.i_x * state.theta_dot * state.theta_dot
        + 0.5 * p.i_y * state.phi_dot * state.phi_dot
        + 0.5 * p.i_r * state.omega.iter().map(|w| w * w).sum::<f64>()
}
