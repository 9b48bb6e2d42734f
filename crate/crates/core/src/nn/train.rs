use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::rng::CounterRng;

use super::adam::{AdamConfig, AdamState};
use super::features::SampleSet;
use super::loss::LossConfig;
use super::model::Model;
use super::spec::Architecture;

/// Samples per gradient work unit; partial sums are added in unit order.
pub const GRAD_CHUNK: usize = 8;
pub const DEFAULT_BATCH: usize = 32;
pub const DEFAULT_EPOCHS: usize = 200;

const INIT_STREAM: u64 = 0x1417;
const SHUFFLE_STREAM: u64 = 0x5417;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub loss: LossConfig,
    pub adam: AdamConfig,
    pub exec: Exec,
}

impl TrainConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            epochs: DEFAULT_EPOCHS,
            batch_size: DEFAULT_BATCH,
            seed,
            loss: LossConfig::default(),
            adam: AdamConfig::default(),
            exec: Exec::Sequential,
        }
    }

    pub fn with_epochs(self, epochs: usize) -> Self {
        Self { epochs, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    /// 0 is the initialized model before any update.
    pub epoch: usize,
    pub train_loss: f64,
    pub test_loss: f64,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model: Model,
    pub adam: AdamState,
    pub history: Vec<EpochRecord>,
}

impl TrainOutcome {
    pub fn initial_test_loss(&self) -> f64 {
        self.history[0].test_loss
    }

    pub fn final_test_loss(&self) -> f64 {
        self.history.last().map_or(f64::NAN, |r| r.test_loss)
    }
}

/// Xavier initialisation drawn from the seed's init stream.
pub fn init_model(arch: Architecture, seed: u64) -> Model {
    Model::xavier(arch, &mut CounterRng::from_path(seed, &[INIT_STREAM]))
}

/// Loss over `indices` (mean data term plus L2) and its exact gradient.
pub fn batch_gradient(
    model: &Model,
    out_scale: &[f64; 5],
    set: &SampleSet,
    indices: &[usize],
    loss: &LossConfig,
    exec: Exec,
) -> (f64, Vec<f64>) {
    assert!(!indices.is_empty(), "empty batch");
    let inv_n = 1.0 / indices.len() as f64;
    let chunks: Vec<&[usize]> = indices.chunks(GRAD_CHUNK).collect();
    let partial = exec.map(chunks.len(), |c| {
        let mut grad = vec![0.0; model.num_params()];
        let mut sum = 0.0;
        for &i in chunks[c] {
            model.backprop(set.input(i), &mut grad, |raw| {
                let pred: Vec<f64> = raw.iter().zip(out_scale).map(|(r, s)| r * s).collect();
                let mut dpred = [0.0; 5];
                sum += loss.sample_term(&pred, &set.targets[i], &mut dpred);
                (0..5).map(|k| dpred[k] * out_scale[k] * inv_n).collect()
            });
        }
        (sum, grad)
    });
    let mut grad = vec![0.0; model.num_params()];
    let mut sum = 0.0;
    for (s, g) in partial {
        sum += s;
        for (a, b) in grad.iter_mut().zip(&g) {
            *a += b;
        }
    }
    let params = model.params();
    for r in model.layout().weight_ranges() {
        for i in r {
            grad[i] += 2.0 * loss.gamma_reg * params[i];
        }
    }
    (sum * inv_n + loss.gamma_reg * model.weight_sq_norm(), grad)
}

/// Mean data term over the whole set plus the L2 penalty.
pub fn evaluate(model: &Model, out_scale: &[f64; 5], set: &SampleSet, loss: &LossConfig, exec: Exec) -> f64 {
    if set.is_empty() {
        return f64::NAN;
    }
    let chunk = 256;
    let n_chunks = set.len().div_ceil(chunk);
    let sums = exec.map(n_chunks, |c| {
        let mut dpred = [0.0; 5];
        let lo = c * chunk;
        let hi = (lo + chunk).min(set.len());
        (lo..hi)
            .map(|i| {
                let raw = model.forward(set.input(i));
                let pred: Vec<f64> = raw.iter().zip(out_scale).map(|(r, s)| r * s).collect();
                loss.sample_term(&pred, &set.targets[i], &mut dpred)
            })
            .sum::<f64>()
    });
    sums.iter().sum::<f64>() / set.len() as f64 + loss.gamma_reg * model.weight_sq_norm()
}

/// Mini-batch Adam training with a seeded shuffle per epoch.
pub fn train(
    arch: Architecture,
    out_scale: &[f64; 5],
    train_set: &SampleSet,
    test_set: &SampleSet,
    cfg: &TrainConfig,
) -> Result<TrainOutcome> {
    cfg.loss.validate()?;
    if train_set.is_empty() {
        return Err(Error::Config("training set is empty".into()));
    }
    if test_set.is_empty() {
        return Err(Error::Config("test set is empty".into()));
    }
    if cfg.batch_size == 0 {
        return Err(Error::Config("batch size must be positive".into()));
    }
    if train_set.input_dim != arch.input_dim() {
        return Err(Error::Shape(format!(
            "samples have {} inputs, network expects {}",
            train_set.input_dim,
            arch.input_dim()
        )));
    }
    let mut model = init_model(arch, cfg.seed);
    let mut adam = AdamState::new(cfg.adam, model.num_params());
    let mut history = Vec::with_capacity(cfg.epochs + 1);
    history.push(EpochRecord {
        epoch: 0,
        train_loss: evaluate(&model, out_scale, train_set, &cfg.loss, cfg.exec),
        test_loss: evaluate(&model, out_scale, test_set, &cfg.loss, cfg.exec),
    });
    let mut order: Vec<usize> = (0..train_set.len()).collect();
    for epoch in 1..=cfg.epochs {
        let mut rng = CounterRng::from_path(cfg.seed, &[SHUFFLE_STREAM, epoch as u64]);
        rng.shuffle(&mut order);
        let mut weighted = 0.0;
        for (batch, idx) in order.chunks(cfg.batch_size).enumerate() {
            let (loss, grad) = batch_gradient(&model, out_scale, train_set, idx, &cfg.loss, cfg.exec);
            if !loss.is_finite() || grad.iter().any(|g| !g.is_finite()) {
                return Err(Error::TrainingDiverged { epoch, batch, loss });
            }
            weighted += loss * idx.len() as f64;
            adam.apply(model.params_mut(), &grad);
        }
        let record = EpochRecord {
            epoch,
            train_loss: weighted / train_set.len() as f64,
            test_loss: evaluate(&model, out_scale, test_set, &cfg.loss, cfg.exec),
        };
        log::info!(
            "epoch {epoch}/{}: train {:.6} test {:.6}",
            cfg.epochs,
            record.train_loss,
            record.test_loss
        );
        history.push(record);
    }
    Ok(TrainOutcome { model, adam, history })
}
