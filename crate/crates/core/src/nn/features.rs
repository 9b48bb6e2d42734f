use serde::{Deserialize, Serialize};

use crate::dataset::DatasetInstance;
use crate::vehicle::{ControlInput, VehicleParams, VehicleState};

use super::spec::STATE_FEATURES;

/// Fixed input and output scaling stored with every model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub speed: f64,
    pub angle: f64,
    pub wheel_speed: f64,
    pub position: f64,
    /// Raw network outputs are multiplied by these to give N·m and rad.
    pub torque: f64,
    pub steering: f64,
}

impl Normalization {
    pub fn for_params(params: &VehicleParams) -> Self {
        Self {
            speed: 40.0,
            angle: 0.5,
            wheel_speed: 40.0 / params.r_eff,
            position: 120.0,
            torque: 2000.0,
            steering: 0.5,
        }
    }

    /// V_x, V_y, yaw rate, pitch, roll, pitch rate, roll rate, four wheel speeds.
    pub fn state_features(&self, s: &VehicleState) -> [f64; STATE_FEATURES] {
        [
            s.vx / self.speed,
            s.vy / self.speed,
            s.psi_dot / self.angle,
            s.theta / self.angle,
            s.phi / self.angle,
            s.theta_dot / self.angle,
            s.phi_dot / self.angle,
            s.omega[0] / self.wheel_speed,
            s.omega[1] / self.wheel_speed,
            s.omega[2] / self.wheel_speed,
            s.omega[3] / self.wheel_speed,
        ]
    }

    /// State features, then all X, then all Y, in body-frame metres.
    pub fn encode(&self, state: &VehicleState, trajectory: &[(f64, f64)]) -> Vec<f64> {
        let mut v = Vec::with_capacity(STATE_FEATURES + 2 * trajectory.len());
        self.encode_into(state, trajectory, &mut v);
        v
    }

    pub fn encode_into(&self, state: &VehicleState, trajectory: &[(f64, f64)], out: &mut Vec<f64>) {
        out.extend_from_slice(&self.state_features(state));
        out.extend(trajectory.iter().map(|p| p.0 / self.position));
        out.extend(trajectory.iter().map(|p| p.1 / self.position));
    }

    pub fn output_scale(&self) -> [f64; 5] {
        [self.torque, self.torque, self.torque, self.torque, self.steering]
    }

    pub fn decode(&self, raw: &[f64]) -> ControlInput {
        let s = self.output_scale();
        ControlInput::new(
            [raw[0] * s[0], raw[1] * s[1], raw[2] * s[2], raw[3] * s[3]],
            raw[4] * s[4],
        )
    }
}

/// Encoded inputs and physical targets, row-major.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SampleSet {
    pub input_dim: usize,
    pub inputs: Vec<f64>,
    pub targets: Vec<[f64; 5]>,
}

impl SampleSet {
    pub fn from_instances(norm: &Normalization, instances: &[DatasetInstance]) -> Self {
        let input_dim = instances
            .first()
            .map(|i| STATE_FEATURES + 2 * i.trajectory.len())
            .unwrap_or(0);
        let mut inputs = Vec::with_capacity(input_dim * instances.len());
        let mut targets = Vec::with_capacity(instances.len());
        for inst in instances {
            norm.encode_into(&inst.xi0, &inst.trajectory, &mut inputs);
            targets.push(inst.u.to_array());
        }
        Self {
            input_dim,
            inputs,
            targets,
        }
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn input(&self, i: usize) -> &[f64] {
        &self.inputs[i * self.input_dim..(i + 1) * self.input_dim]
    }

    pub fn subset(&self, indices: &[usize]) -> Self {
        let mut out = SampleSet {
            input_dim: self.input_dim,
            inputs: Vec::with_capacity(indices.len() * self.input_dim),
            targets: Vec::with_capacity(indices.len()),
        };
        for &i in indices {
            out.inputs.extend_from_slice(self.input(i));
            out.targets.push(self.targets[i]);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn feature_layout() {
        let p = VehicleParams::default();
        let n = Normalization::for_params(&p);
        let mut s = VehicleState {
            vx: 20.0,
            vy: -4.0,
            psi_dot: 0.25,
            x: 99.0,
            psi: 1.0,
            ..VehicleState::default()
        };
        s.omega = [40.0 / p.r_eff; 4];
        let v = n.encode(&s, &[(12.0, 0.0), (24.0, 6.0)]);
        assert_eq!(v.len(), 15);
        assert_eq!(&v[..3], &[0.5, -0.1, 0.5]);
        assert_eq!(&v[7..11], &[1.0; 4]);
        assert_eq!(&v[11..], &[0.1, 0.2, 0.0, 0.05]);
        let c = n.decode(&[0.5, -0.25, 0.0, 1.0, 0.1]);
        assert_eq!(c.torques, [1000.0, -500.0, 0.0, 2000.0]);
        assert!((c.delta - 0.05).abs() < 1e-15);
    }
}
