//! Dense and 1-D convolutional networks with manual backpropagation.

pub mod adam;
pub mod checkpoint;
pub mod features;
pub mod grid;
pub mod layout;
pub mod loss;
pub mod model;
pub mod spec;
pub mod tensor;
pub mod train;

pub use adam::{AdamConfig, AdamState};
pub use checkpoint::{Checkpoint, InverseModel, TrainingMeta};
pub use features::{Normalization, SampleSet};
pub use grid::{full_grid, grid_search, GridResult};
pub use loss::LossConfig;
pub use model::{avg_pool, xavier_bound, xavier_init, Model};
pub use spec::{Architecture, CnnSpec, ConvStackSpec, MlpSpec};
pub use tensor::Tensor;
pub use train::{batch_gradient, evaluate, init_model, train, EpochRecord, TrainConfig, TrainOutcome};
