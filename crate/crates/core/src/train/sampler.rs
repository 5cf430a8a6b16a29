use rand::seq::index;
use rand::Rng;
use rand_distr::weighted::WeightedAliasIndex;
use rand_distr::Distribution;

use crate::error::{Error, Result};
use crate::model::SoftmaxSupport;

/// How the softmax over the vocabulary is approximated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SoftmaxMode {
    /// Importance sampling: `negatives` proposal draws with replacement,
    /// target excluded from the draws.
    Sampled { negatives: usize },
    /// Distinct ids drawn uniformly without replacement. With
    /// `negatives >= V - 1` this is the exact softmax.
    UniformWithoutReplacement { negatives: usize },
    /// Exact softmax over the whole vocabulary.
    Full,
}

/// Proposal distribution over vocabulary ids with O(1) draws.
#[derive(Debug, Clone)]
pub struct SamplerTable {
    probs: Vec<f64>,
    alias: WeightedAliasIndex<f64>,
}

impl SamplerTable {
    /// Unigram frequencies raised to `power`, normalized.
    pub fn unigram(counts: impl IntoIterator<Item = u64>, power: f64) -> Result<Self> {
        let weights: Vec<f64> = counts.into_iter().map(|c| (c.max(1) as f64).powf(power)).collect();
        Self::from_weights(weights)
    }

    pub fn uniform(vocab_size: usize) -> Result<Self> {
        Self::from_weights(vec![1.0; vocab_size])
    }

    fn from_weights(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidConfig("sampler over an empty vocabulary".into()));
        }
        let total: f64 = weights.iter().sum();
        let probs: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let alias = WeightedAliasIndex::new(weights)
            .map_err(|e| Error::InvalidConfig(format!("proposal distribution: {e}")))?;
        Ok(SamplerTable { probs, alias })
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probability(&self, id: u32) -> f64 {
        self.probs[id as usize]
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    #[inline]
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        self.alias.sample(rng) as u32
    }

    /// Fills `out` with the target (entry 0, no correction) followed by the
    /// negative ids for `mode`. Each negative's logit is shifted by
    /// `-ln E[count of id in the draw]`.
    pub fn draw_support<R: Rng + ?Sized>(&self, target: u32, mode: SoftmaxMode, rng: &mut R, out: &mut SoftmaxSupport) {
        let v = self.probs.len();
        out.clear();
        out.push(target, 0.0);
        if v == 1 {
            return;
        }
        match mode {
            SoftmaxMode::Full => {
                for id in (0..v as u32).filter(|&i| i != target) {
                    out.push(id, 0.0);
                }
            }
            SoftmaxMode::Sampled { negatives } => {
                let rest = 1.0 - self.probs[target as usize];
                let scale = negatives as f64 / rest;
                for _ in 0..negatives {
                    let id = loop {
                        let id = self.draw(rng);
                        if id != target {
                            break id;
                        }
                    };
                    out.push(id, -(scale * self.probs[id as usize]).ln());
                }
            }
            SoftmaxMode::UniformWithoutReplacement { negatives } => {
                let k = negatives.min(v - 1);
                let correction = -(k as f64 / (v - 1) as f64).ln();
                for i in index::sample(rng, v - 1, k) {
                    let id = if (i as u32) < target { i as u32 } else { i as u32 + 1 };
                    out.push(id, correction);
                }
            }
        }
    }
}
