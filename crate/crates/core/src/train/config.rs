use super::sampler::SoftmaxMode;
use crate::error::{Error, Result};
use crate::model::ModelKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunMode {
    /// Learn every parameter; dropout active.
    Train,
    /// Only fresh document vectors are optimized; everything else is frozen.
    Infer,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub adagrad_epsilon: f64,
    /// Dropout on the embedding-layer input, training only.
    pub dropout: f64,
    pub softmax: SoftmaxMode,
    /// Exponent applied to unigram counts for the proposal distribution.
    pub proposal_power: f64,
    pub seed: u64,
    pub workers: usize,
    pub mode: RunMode,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 10,
            learning_rate: 0.1,
            adagrad_epsilon: 1e-8,
            dropout: 0.1,
            softmax: SoftmaxMode::Sampled { negatives: 64 },
            proposal_power: 0.75,
            seed: 0,
            workers: 1,
            mode: RunMode::Train,
        }
    }
}

impl TrainConfig {
    pub fn inference() -> Self {
        TrainConfig {
            mode: RunMode::Infer,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_owned()));
        if self.epochs == 0 {
            return bad("epochs must be positive");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning rate must be positive");
        }
        if self.adagrad_epsilon.is_nan() || self.adagrad_epsilon <= 0.0 {
            return bad("adagrad epsilon must be positive");
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return bad("dropout rate must lie in [0, 1)");
        }
        match self.softmax {
            SoftmaxMode::Sampled { negatives } | SoftmaxMode::UniformWithoutReplacement { negatives }
                if negatives == 0 =>
            {
                return bad("at least one negative sample is required")
            }
            _ => {}
        }
        if self.workers == 0 {
            return bad("workers must be positive");
        }
        Ok(())
    }
}

/// Architecture requested for training; the vocabulary size comes from the
/// corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub code_bits: usize,
    pub doc_dim: usize,
    pub word_dim: usize,
    pub context_window: usize,
}

impl ModelSpec {
    pub fn binary_pvdbow(bits: usize) -> Self {
        ModelSpec {
            kind: ModelKind::BinaryPvdbow,
            code_bits: bits,
            doc_dim: bits,
            word_dim: 0,
            context_window: 0,
        }
    }

    pub fn pvdbow(dim: usize) -> Self {
        ModelSpec {
            kind: ModelKind::Pvdbow,
            ..Self::binary_pvdbow(dim)
        }
    }

    pub fn real_binary(dim: usize, bits: usize) -> Self {
        ModelSpec {
            kind: ModelKind::RealBinaryPvdbow,
            code_bits: bits,
            doc_dim: dim,
            word_dim: 0,
            context_window: 0,
        }
    }

    /// Binary PV-DM with word embeddings as wide as the code.
    pub fn binary_pvdm(bits: usize, window: usize) -> Self {
        ModelSpec {
            kind: ModelKind::BinaryPvdm,
            code_bits: bits,
            doc_dim: bits,
            word_dim: bits,
            context_window: window,
        }
    }
}
