use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fsutil;
use crate::vehicle::{ControlInput, VehicleState};

use super::adam::{AdamConfig, AdamState};
use super::features::Normalization;
use super::loss::LossConfig;
use super::model::Model;
use super::spec::Architecture;
use super::train::{EpochRecord, TrainOutcome};

pub const CHECKPOINT_FORMAT: &str = "vdl-checkpoint";
pub const CHECKPOINT_VERSION: u32 = 1;

mod hex_f64 {
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn encode(values: &[f64]) -> String {
        let mut bytes = Vec::with_capacity(values.len() * 8);
        for v in values {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        hex::encode(bytes)
    }

    pub fn decode(text: &str) -> Result<Vec<f64>, String> {
        let bytes = hex::decode(text).map_err(|e| e.to_string())?;
        if bytes.len() % 8 != 0 {
            return Err(format!("{} bytes is not a whole number of f64", bytes.len()));
        }
        Ok(bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
            .collect())
    }

    pub fn serialize<S: Serializer>(values: &[f64], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&encode(values))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        let text = String::deserialize(d)?;
        decode(&text).map_err(D::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedTensor {
    pub name: String,
    pub shape: Vec<usize>,
    #[serde(with = "hex_f64")]
    pub data: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerRecord {
    pub config: AdamConfig,
    pub step: u64,
    #[serde(with = "hex_f64")]
    pub m: Vec<f64>,
    #[serde(with = "hex_f64")]
    pub v: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingMeta {
    pub seed: u64,
    pub epochs: usize,
    pub batch_size: usize,
    pub dataset_hash: String,
    /// SHA-256 of the resolved run configuration.
    pub config_hash: String,
    pub train_count: usize,
    pub test_count: usize,
    pub history: Vec<EpochRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format: String,
    pub version: u32,
    pub architecture: Architecture,
    pub normalization: Normalization,
    pub loss: LossConfig,
    pub weights: Vec<NamedTensor>,
    pub optimizer: OptimizerRecord,
    pub metadata: TrainingMeta,
}

impl Checkpoint {
    pub fn new(
        model: &Model,
        adam: &AdamState,
        normalization: Normalization,
        loss: LossConfig,
        metadata: TrainingMeta,
    ) -> Self {
        let weights = model
            .layout()
            .slots
            .iter()
            .map(|s| NamedTensor {
                name: s.name.clone(),
                shape: s.shape.clone(),
                data: model.params()[s.range()].to_vec(),
            })
            .collect();
        Self {
            format: CHECKPOINT_FORMAT.into(),
            version: CHECKPOINT_VERSION,
            architecture: model.architecture().clone(),
            normalization,
            loss,
            weights,
            optimizer: OptimizerRecord {
                config: adam.config,
                step: adam.step,
                m: adam.m.clone(),
                v: adam.v.clone(),
            },
            metadata,
        }
    }

    pub fn from_outcome(
        outcome: &TrainOutcome,
        normalization: Normalization,
        loss: LossConfig,
        metadata: TrainingMeta,
    ) -> Self {
        Self::new(&outcome.model, &outcome.adam, normalization, loss, metadata)
    }

    pub fn model(&self) -> Result<Model> {
        let mut model = Model::zeros(self.architecture.clone());
        let expected: Vec<(String, Vec<usize>)> = model
            .layout()
            .slots
            .iter()
            .map(|s| (s.name.clone(), s.shape.clone()))
            .collect();
        let found: Vec<(String, Vec<usize>)> =
            self.weights.iter().map(|t| (t.name.clone(), t.shape.clone())).collect();
        if expected != found {
            return Err(Error::Format("checkpoint tensors do not match the architecture".into()));
        }
        for t in &self.weights {
            model.set_tensor(&t.name, &t.data)?;
        }
        Ok(model)
    }

    pub fn adam(&self) -> Result<AdamState> {
        let n = self.weights.iter().map(|t| t.data.len()).sum::<usize>();
        if self.optimizer.m.len() != n || self.optimizer.v.len() != n {
            return Err(Error::Format("optimizer moments do not match the weights".into()));
        }
        Ok(AdamState {
            config: self.optimizer.config,
            m: self.optimizer.m.clone(),
            v: self.optimizer.v.clone(),
            step: self.optimizer.step,
        })
    }

    pub fn inverse_model(&self) -> Result<InverseModel> {
        Ok(InverseModel {
            model: self.model()?,
            normalization: self.normalization,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)
            .map_err(|e| Error::Format(format!("checkpoint serialisation: {e}")))?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: Checkpoint =
            serde_json::from_str(text).map_err(|e| Error::Format(format!("checkpoint: {e}")))?;
        if c.format != CHECKPOINT_FORMAT {
            return Err(Error::Format(format!("not a checkpoint (format {:?})", c.format)));
        }
        if c.version != CHECKPOINT_VERSION {
            return Err(Error::Format(format!("unsupported checkpoint version {}", c.version)));
        }
        c.model()?;
        c.adam()?;
        Ok(c)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fsutil::atomic_write(path, self.to_json()?.as_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

/// A trained network with the scaling that maps vehicle quantities to it.
#[derive(Debug, Clone, PartialEq)]
pub struct InverseModel {
    pub model: Model,
    pub normalization: Normalization,
}

impl InverseModel {
    /// Controls that should make the vehicle follow `trajectory`, given in
    /// the body frame at the current state.
    pub fn predict(&self, state: &VehicleState, trajectory: &[(f64, f64)]) -> ControlInput {
        let input = self.normalization.encode(state, trajectory);
        self.normalization.decode(&self.model.forward(&input))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hex_round_trip_is_bitwise() {
        let vals = [0.1, -0.0, f64::MIN_POSITIVE, 1e300, -3.25, f64::from_bits(1)];
        let back = hex_f64::decode(&hex_f64::encode(&vals)).unwrap();
        for (a, b) in vals.iter().zip(&back) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        assert_eq!(hex_f64::encode(&[1.0]), "000000000000f03f");
        assert!(hex_f64::decode("00ff").is_err());
    }
}
