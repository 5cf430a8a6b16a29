//! Stochastic training and frozen-weight inference.

mod adagrad;
mod config;
mod dropout;
mod infer;
mod sampler;
mod trainer;

pub use adagrad::{adagrad_step, adagrad_update, adagrad_update_shared, AtomicF32};
pub use config::{ModelSpec, RunMode, TrainConfig};
pub use dropout::dropout_apply;
pub use infer::{infer_codes, InferredDoc};
pub use sampler::{SamplerTable, SoftmaxMode};
pub use trainer::{sampled_softmax_loss_grad, train, Checkpoint, EpochStats, TrainReport};
