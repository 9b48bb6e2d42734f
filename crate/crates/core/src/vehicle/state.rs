/// Number of scalar entries in a [`VehicleState`].
pub const STATE_DIM: usize = 14;

/// Wheel indices, fixed as fl, fr, rl, rr.
pub const FL: usize = 0;
pub const FR: usize = 1;
pub const RL: usize = 2;
pub const RR: usize = 3;

/// Full 9-DoF state plus ground-frame pose.
///
/// Array layout (used by the integrator and the dataset file):
/// `[X, Y, psi, theta, phi, V_x, V_y, psi_dot, theta_dot, phi_dot, omega_fl, omega_fr, omega_rl, omega_rr]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct VehicleState {
    pub x: f64,
    pub y: f64,
    /// Yaw (rad).
    pub psi: f64,
    /// Roll (rad).
    pub theta: f64,
    /// Pitch (rad).
    pub phi: f64,
    /// Body-frame velocities (m/s).
    pub vx: f64,
    pub vy: f64,
    pub psi_dot: f64,
    pub theta_dot: f64,
    pub phi_dot: f64,
    /// Wheel spin rates (rad/s).
    pub omega: [f64; 4],
}

impl VehicleState {
    pub fn to_array(&self) -> [f64; STATE_DIM] {
        [
            self.x,
            self.y,
            self.psi,
            self.theta,
            self.phi,
            self.vx,
            self.vy,
            self.psi_dot,
            self.theta_dot,
            self.phi_dot,
            self.omega[0],
            self.omega[1],
            self.omega[2],
            self.omega[3],
        ]
    }

    pub fn from_array(a: &[f64; STATE_DIM]) -> Self {
        Self {
            x: a[0],
            y: a[1],
            psi: a[2],
            theta: a[3],
            phi: a[4],
            vx: a[5],
            vy: a[6],
            psi_dot: a[7],
            theta_dot: a[8],
            phi_dot: a[9],
            omega: [a[10], a[11], a[12], a[13]],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }

    /// Total planar speed at the centre of gravity.
    pub fn speed(&self) -> f64 {
        self.vx.hypot(self.vy)
    }

    /// Ground-frame velocity of the centre of gravity.
    pub fn ground_velocity(&self) -> (f64, f64) {
        let (s, c) = self.psi.sin_cos();
        (self.vx * c - self.vy * s, self.vx * s + self.vy * c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ControlInput {
    /// Wheel torques (N m), ordered fl, fr, rl, rr.
    pub torques: [f64; 4],
    /// Front steering angle (rad).
    pub delta: f64,
}

impl ControlInput {
    pub fn new(torques: [f64; 4], delta: f64) -> Self {
        Self { torques, delta }
    }

    /// `[T_fl, T_fr, T_rl, T_rr, delta]`.
    pub fn to_array(&self) -> [f64; 5] {
        let t = self.torques;
        [t[0], t[1], t[2], t[3], self.delta]
    }

    pub fn from_array(a: &[f64; 5]) -> Self {
        Self {
            torques: [a[0], a[1], a[2], a[3]],
            delta: a[4],
        }
    }
}

/// Time derivative of a [`VehicleState`], same layout.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StateDerivative {
    pub x_dot: f64,
    pub y_dot: f64,
    pub psi_dot: f64,
    pub theta_dot: f64,
    pub phi_dot: f64,
    pub vx_dot: f64,
    pub vy_dot: f64,
    pub psi_ddot: f64,
    pub theta_ddot: f64,
    pub phi_ddot: f64,
    pub omega_dot: [f64; 4],
}

impl StateDerivative {
    pub fn to_array(&self) -> [f64; STATE_DIM] {
        VehicleState {
            x: self.x_dot,
            y: self.y_dot,
            psi: self.psi_dot,
            theta: self.theta_dot,
            phi: self.phi_dot,
            vx: self.vx_dot,
            vy: self.vy_dot,
            psi_dot: self.psi_ddot,
            theta_dot: self.theta_ddot,
            phi_dot: self.phi_ddot,
            omega: self.omega_dot,
        }
        .to_array()
    }

    pub fn from_array(a: &[f64; STATE_DIM]) -> Self {
        let s = VehicleState::from_array(a);
        Self {
            x_dot: s.x,
            y_dot: s.y,
            psi_dot: s.psi,
            theta_dot: s.theta,
            phi_dot: s.phi,
            vx_dot: s.vx,
            vy_dot: s.vy,
            psi_ddot: s.psi_dot,
            theta_ddot: s.theta_dot,
            phi_ddot: s.phi_dot,
            omega_dot: s.omega,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }
}
