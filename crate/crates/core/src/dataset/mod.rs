//! Randomized constant-control rollouts for supervised inverse-dynamics
//! learning.
//!
//! Instance `i` of a dataset with master seed `S` draws its acceleration /
//! braking coin from the stream `[i]` and its attempt `a` (torque, steering,
//! initial speeds) from the stream `[i, a + 1]` (see [`crate::rng`]). A rollout
//! whose longitudinal speed drops below [`EPSILON_V`] or that turns non-finite
//! is rejected and redrawn from the next attempt stream within the same branch,
//! so the branch frequencies stay those of a fair coin.

mod io;
mod sampling;

pub use io::{decode, encode, load, save, save_csv, write_csv, FORMAT_VERSION, MAGIC};
pub use sampling::{
    lateral_speed_bounds, sample_branch, sample_control, sample_control_in_branch,
    sample_initial_state, zero_slip_wheel_speeds, Branch,
    ACCEL_TORQUE_MAX, BRAKE_TORQUE_MIN, STEER_LIMIT, VX_MAX, VX_MIN,
};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::rng::CounterRng;
use crate::vehicle::{
    simulate_rollout_with_step, ControlInput, VehicleParams, VehicleState, DEFAULT_DT, EPSILON_V,
};

pub const DEFAULT_COUNT: usize = 43241;
pub const DEFAULT_TRAIN: usize = 28539;
pub const HORIZON: f64 = 3.0;
pub const SAMPLE_DT: f64 = 0.01;
pub const SAMPLES: usize = 301;
/// Attempts per instance before generation gives up.
pub const MAX_ATTEMPTS: u64 = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetInstance {
    pub xi0: VehicleState,
    pub u: ControlInput,
    /// Ground-frame positions sampled every [`SAMPLE_DT`], starting at t = 0.
    pub trajectory: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub instances: Vec<DatasetInstance>,
    /// Instances `[0, split_index)` form the training set.
    pub split_index: usize,
    pub master_seed: u64,
    pub rejections: u64,
    pub dt: f64,
    pub sample_dt: f64,
    pub horizon: f64,
    pub params_hash: [u8; 32],
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn train_len(&self) -> usize {
        self.split_index
    }

    pub fn test_len(&self) -> usize {
        self.len() - self.split_index
    }

    pub fn train(&self) -> &[DatasetInstance] {
        &self.instances[..self.split_index]
    }

    pub fn test(&self) -> &[DatasetInstance] {
        &self.instances[self.split_index..]
    }

    pub fn samples_per_trajectory(&self) -> usize {
        self.instances.first().map_or(SAMPLES, |i| i.trajectory.len())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenConfig {
    pub n: usize,
    /// Training instance count; `None` applies the default 28539/43241 ratio.
    pub train: Option<usize>,
    pub master_seed: u64,
    pub horizon: f64,
    pub sample_dt: f64,
    pub dt: f64,
}

impl GenConfig {
    pub fn new(n: usize, master_seed: u64) -> Self {
        Self {
            n,
            train: None,
            master_seed,
            horizon: HORIZON,
            sample_dt: SAMPLE_DT,
            dt: DEFAULT_DT,
        }
    }

    pub fn train_count(&self) -> Result<usize> {
        match self.train {
            Some(t) if t > self.n => Err(Error::Config(format!(
                "train count {t} exceeds instance count {}",
                self.n
            ))),
            Some(t) => Ok(t),
            None => Ok(default_train_count(self.n)),
        }
    }
}

/// Training-set size under the default split ratio, rounded to nearest.
pub fn default_train_count(n: usize) -> usize {
    ((n as u128 * DEFAULT_TRAIN as u128 + DEFAULT_COUNT as u128 / 2) / DEFAULT_COUNT as u128) as usize
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedInstance {
    pub instance: DatasetInstance,
    pub branch: Branch,
    pub rejections: u64,
}

/// Why a drawn instance was discarded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rejection {
    LowSpeed,
    NonFinite,
}

/// Branch of instance `index`.
pub fn instance_branch(master_seed: u64, index: u64) -> Branch {
    sample_branch(&mut CounterRng::from_path(master_seed, &[index]))
}

/// Draws and simulates one attempt of instance `index` in the given branch.
pub fn try_instance(
    cfg: &GenConfig,
    index: u64,
    branch: Branch,
    attempt: u64,
    params: &VehicleParams,
) -> Result<std::result::Result<DatasetInstance, Rejection>> {
    let mut rng = CounterRng::from_path(cfg.master_seed, &[index, attempt + 1]);
    let u = sample_control_in_branch(&mut rng, branch);
    let xi0 = sample_initial_state(&mut rng, &u, params);
    let rollout = match simulate_rollout_with_step(&xi0, &u, cfg.horizon, cfg.sample_dt, cfg.dt, params)
    {
        Ok(r) => r,
        Err(Error::NonFinite { .. }) => return Ok(Err(Rejection::NonFinite)),
        Err(e) => return Err(e),
    };
    if rollout.states.iter().any(|s| s.vx.abs() < EPSILON_V) {
        return Ok(Err(Rejection::LowSpeed));
    }
    Ok(Ok(DatasetInstance {
        xi0,
        u,
        trajectory: rollout.positions(),
    }))
}

/// Generates instance `index`, re-drawing from the next attempt stream when a
/// rollout is rejected.
pub fn generate_instance(
    cfg: &GenConfig,
    index: u64,
    params: &VehicleParams,
) -> Result<GeneratedInstance> {
    let branch = instance_branch(cfg.master_seed, index);
    for attempt in 0..MAX_ATTEMPTS {
        let outcome = try_instance(cfg, index, branch, attempt, params).map_err(|e| Error::Instance {
            index,
            source: Box::new(e),
        })?;
        if let Ok(instance) = outcome {
            return Ok(GeneratedInstance {
                instance,
                branch,
                rejections: attempt,
            });
        }
    }
    Err(Error::Instance {
        index,
        source: Box::new(Error::Config(format!(
            "no valid rollout after {MAX_ATTEMPTS} attempts"
        ))),
    })
}

pub fn generate_dataset(cfg: &GenConfig, params: &VehicleParams, exec: Exec) -> Result<Dataset> {
    if cfg.n == 0 {
        return Err(Error::Config("dataset needs at least one instance".into()));
    }
    let split_index = cfg.train_count()?;
    let generated = exec.try_map(cfg.n, |i| generate_instance(cfg, i as u64, params))?;
    let rejections = generated.iter().map(|g| g.rejections).sum::<u64>();
    let accelerating = generated
        .iter()
        .filter(|g| g.branch == Branch::Accelerate)
        .count();
    log::debug!("{accelerating} of {} instances accelerate", cfg.n);
    if rejections > 0 {
        log::info!("re-drew {rejections} rejected rollouts for {} instances", cfg.n);
    }
    Ok(Dataset {
        instances: generated.into_iter().map(|g| g.instance).collect(),
        split_index,
        master_seed: cfg.master_seed,
        rejections,
        dt: cfg.dt,
        sample_dt: cfg.sample_dt,
        horizon: cfg.horizon,
        params_hash: params.hash(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_split_counts() {
        assert_eq!(default_train_count(DEFAULT_COUNT), DEFAULT_TRAIN);
        assert_eq!(DEFAULT_COUNT - default_train_count(DEFAULT_COUNT), 14702);
        assert_eq!(default_train_count(1), 1);
        let cfg = GenConfig {
            train: Some(11),
            ..GenConfig::new(10, 0)
        };
        assert!(cfg.train_count().is_err());
    }

    #[test]
    fn small_dataset_invariants() {
        let p = VehicleParams::default();
        let ds = generate_dataset(&GenConfig::new(6, 1), &p, Exec::Sequential).unwrap();
        assert_eq!(ds.len(), 6);
        assert_eq!(ds.train_len() + ds.test_len(), 6);
        for inst in &ds.instances {
            assert_eq!(inst.trajectory.len(), SAMPLES);
            assert_eq!(inst.trajectory[0], (0.0, 0.0));
            assert_eq!(inst.trajectory[0], (inst.xi0.x, inst.xi0.y));
        }
        let bytes = encode(&ds);
        assert_eq!(decode(&bytes).unwrap(), ds);
    }

    #[test]
    fn decode_rejects_corruption() {
        let p = VehicleParams::default();
        let ds = generate_dataset(&GenConfig::new(2, 5), &p, Exec::Sequential).unwrap();
        let mut bytes = encode(&ds);
        bytes[100] ^= 1;
        assert!(decode(&bytes).is_err());
        assert!(decode(&bytes[..50]).is_err());
    }
}
