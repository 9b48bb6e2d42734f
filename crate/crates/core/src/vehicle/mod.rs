//! 9-DoF vehicle model: planar body motion, roll, pitch and four wheel spins,
//! with combined-slip tires and suspension load transfer.

mod dynamics;
mod integrate;
mod params;
mod state;
mod tire;

pub use dynamics::{
    aero_drag, derivatives, evaluate, kinetic_energy, suspension_normal_forces,
    suspension_travel,
};
pub use integrate::{
    advance, rk4_step, simulate_rollout, simulate_rollout_with_step, Rollout, DEFAULT_DT,
};
pub use params::{TireCoeffs, VehicleParams, DEFAULT_PARAMS_FILE, PARAM_KEYS};
pub use state::{
    ControlInput, StateDerivative, VehicleState, FL, FR, RL, RR, STATE_DIM,
};
pub use tire::{
    forces_to_vehicle_frame, slip_angles, slip_ratio, tire_forces, tire_frame_speeds,
    wheel_positions, wheel_velocities, TireOutput, EPSILON_V,
};
