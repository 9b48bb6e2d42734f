use crate::error::{Error, Result};
use crate::nn::InverseModel;
use crate::vehicle::{ControlInput, VehicleState};

use super::bezier::{build_bezier_query, QUERY_HORIZON, QUERY_SAMPLES};
use super::path::ReferencePath;
use super::sim::{Controller, Observation};

pub const NN_PERIOD: f64 = 0.3;
pub const STEERING_LIMIT: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NnControllerConfig {
    pub period: f64,
    pub horizon: f64,
    pub samples: usize,
    pub steering_limit: f64,
    pub torque_limit: Option<f64>,
}

impl Default for NnControllerConfig {
    fn default() -> Self {
        Self {
            period: NN_PERIOD,
            horizon: QUERY_HORIZON,
            samples: QUERY_SAMPLES,
            steering_limit: STEERING_LIMIT,
            torque_limit: None,
        }
    }
}

/// Learned inverse model queried on Bezier trajectories, zero-order hold.
#[derive(Debug, Clone)]
pub struct NnController {
    pub name: String,
    pub model: InverseModel,
    pub config: NnControllerConfig,
}

impl NnController {
    pub fn new(name: impl Into<String>, model: InverseModel, config: NnControllerConfig) -> Self {
        Self {
            name: name.into(),
            model,
            config,
        }
    }

    /// One query: build the Bezier trajectory, run the network, clamp.
    pub fn query(&self, state: &VehicleState, path: &ReferencePath, s_now: f64) -> Result<ControlInput> {
        let q = build_bezier_query(state, path, s_now, self.config.horizon, self.config.samples);
        let raw = self.model.predict(state, &q.body);
        if !(raw.delta.is_finite() && raw.torques.iter().all(|t| t.is_finite())) {
            return Err(Error::Divergence(format!(
                "network returned {raw:?} for state {state:?}"
            )));
        }
        Ok(self.clamp(raw))
    }

    pub fn clamp(&self, u: ControlInput) -> ControlInput {
        let lim = self.config.steering_limit;
        let torques = match self.config.torque_limit {
            Some(t) => u.torques.map(|v| v.clamp(-t, t)),
            None => u.torques,
        };
        ControlInput::new(torques, u.delta.clamp(-lim, lim))
    }
}

impl Controller for NnController {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn period(&self) -> f64 {
        self.config.period
    }

    fn control(&mut self, obs: &Observation<'_>) -> Result<ControlInput> {
        self.query(obs.state, obs.path, obs.projection.s)
    }
}
