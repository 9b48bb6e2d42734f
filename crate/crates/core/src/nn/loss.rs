use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of the steering angle in a control vector.
pub const STEER: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossConfig {
    pub gamma: f64,
    pub steering_scale: f64,
    pub torque_scale: f64,
    pub gamma_reg: f64,
}

impl Default for LossConfig {
    fn default() -> Self {
        Self {
            gamma: 0.99,
            steering_scale: 1.0 / 0.5,
            torque_scale: 1.0 / (4.0 * 2000.0),
            gamma_reg: 1e-5,
        }
    }
}

impl LossConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::Config(format!("gamma {} outside [0, 1]", self.gamma)));
        }
        if !(self.gamma_reg >= 0.0) {
            return Err(Error::Config(format!("gamma_reg {} is negative", self.gamma_reg)));
        }
        if !(self.steering_scale.is_finite() && self.torque_scale.is_finite()) {
            return Err(Error::Config("loss scales must be finite".into()));
        }
        Ok(())
    }

    /// Unaveraged data term of one sample and its gradient w.r.t. `pred`.
    pub fn sample_term(&self, pred: &[f64], target: &[f64], dpred: &mut [f64]) -> f64 {
        debug_assert_eq!(pred.len(), 5);
        let ws = self.gamma * self.steering_scale;
        let wt = (1.0 - self.gamma) * self.torque_scale;
        let mut total = 0.0;
        for i in 0..5 {
            let e = pred[i] - target[i];
            let w = if i == STEER { ws } else { wt };
            total += w * e * e;
            dpred[i] = 2.0 * w * e;
        }
        total
    }

    /// Batch loss: mean data term over samples plus the L2 penalty.
    pub fn batch_loss<'a, I>(&self, pairs: I, weight_sq_norm: f64) -> f64
    where
        I: IntoIterator<Item = (&'a [f64], &'a [f64])>,
    {
        let mut scratch = [0.0; 5];
        let mut sum = 0.0;
        let mut n = 0usize;
        for (p, t) in pairs {
            sum += self.sample_term(p, t, &mut scratch);
            n += 1;
        }
        let data = if n == 0 { 0.0 } else { sum / n as f64 };
        data + self.gamma_reg * weight_sq_norm
    }
}
