//! Vehicle inverse-dynamics laboratory.
//!
//! A 9-DoF vehicle simulator generates rollouts of constant controls; small
//! from-scratch neural networks learn the inverse map from a target trajectory
//! to wheel torques and steering; the learned models then drive a reference
//! track in closed loop next to pure-pursuit, Stanley and PI baselines.

pub mod baselines;
pub mod dataset;
pub mod error;
pub mod exec;
pub mod fsutil;
pub mod kvconfig;
pub mod nn;
pub mod rng;
pub mod tracking;
pub mod vehicle;

pub use error::{Error, Result};
pub use exec::Exec;
