use super::dynamics::derivative_array;
use super::params::VehicleParams;
use super::state::{ControlInput, VehicleState, STATE_DIM};
use crate::error::{Error, Result};

/// Integrator step used everywhere unless a test overrides it (s).
pub const DEFAULT_DT: f64 = 1e-3;

type Vector = [f64; STATE_DIM];

#[inline]
fn axpy(y: &Vector, k: &Vector, h: f64) -> Vector {
    std::array::from_fn(|i| y[i] + h * k[i])
}

/// One classical fourth-order Runge-Kutta step under a constant control.
pub fn rk4_step(
    state: &VehicleState,
    control: &ControlInput,
    params: &VehicleParams,
    dt: f64,
) -> VehicleState {
    let y = state.to_array();
    let k1 = derivative_array(&y, control, params);
    let k2 = derivative_array(&axpy(&y, &k1, 0.5 * dt), control, params);
    let k3 = derivative_array(&axpy(&y, &k2, 0.5 * dt), control, params);
    let k4 = derivative_array(&axpy(&y, &k3, dt), control, params);
    let next: Vector =
        std::array::from_fn(|i| y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
    VehicleState::from_array(&next)
}

/// Advances `state` by `n_steps` RK4 steps, failing on the first non-finite
/// state. `t0` only labels the error.
pub fn advance(
    state: &VehicleState,
    control: &ControlInput,
    params: &VehicleParams,
    dt: f64,
    n_steps: usize,
    t0: f64,
) -> Result<VehicleState> {
    let mut s = *state;
    for k in 0..n_steps {
        s = rk4_step(&s, control, params, dt);
        if !s.is_finite() {
            return Err(Error::NonFinite {
                time: t0 + (k + 1) as f64 * dt,
                detail: format!("state {s:?} under control {control:?}"),
            });
        }
    }
    Ok(s)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rollout {
    pub times: Vec<f64>,
    pub states: Vec<VehicleState>,
}

impl Rollout {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn positions(&self) -> Vec<(f64, f64)> {
        self.states.iter().map(|s| (s.x, s.y)).collect()
    }
}

/// Integer ratio `a / b`, or `None` when it is not (close to) an integer.
fn integer_ratio(a: f64, b: f64) -> Option<usize> {
    let r = a / b;
    let n = r.round();
    ((r - n).abs() < 1e-6 && n >= 1.0).then_some(n as usize)
}

/// Constant-control rollout sampled every `sample_dt`, starting with the
/// initial state at t = 0.
pub fn simulate_rollout(
    state0: &VehicleState,
    control: &ControlInput,
    duration: f64,
    sample_dt: f64,
    params: &VehicleParams,
) -> Result<Rollout> {
    simulate_rollout_with_step(state0, control, duration, sample_dt, DEFAULT_DT, params)
}

pub fn simulate_rollout_with_step(
    state0: &VehicleState,
    control: &ControlInput,
    duration: f64,
    sample_dt: f64,
    dt: f64,
    params: &VehicleParams,
) -> Result<Rollout> {
    if !(duration > 0.0) {
        return Err(Error::Config(format!("rollout duration must be positive, got {duration}")));
    }
    let steps_per_sample = integer_ratio(sample_dt, dt).ok_or_else(|| {
        Error::Config(format!("sample_dt {sample_dt} is not a multiple of dt {dt}"))
    })?;
    let n_samples = integer_ratio(duration, sample_dt).ok_or_else(|| {
        Error::Config(format!("duration {duration} is not a multiple of sample_dt {sample_dt}"))
    })?;

    let mut times = Vec::with_capacity(n_samples + 1);
    let mut states = Vec::with_capacity(n_samples + 1);
    let mut s = *state0;
    times.push(0.0);
    states.push(s);
    for k in 0..n_samples {
        let t0 = k as f64 * sample_dt;
        s = advance(&s, control, params, dt, steps_per_sample, t0)?;
        times.push((k + 1) as f64 * sample_dt);
        states.push(s);
    }
    Ok(Rollout { times, states })
}
