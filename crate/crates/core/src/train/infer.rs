use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::adagrad::adagrad_update;
use super::config::{RunMode, TrainConfig};
use super::sampler::SamplerTable;
use super::trainer::{build_sampler, check_documents, mix_seed, STREAM_INFER};
use crate::corpus::CorpusDocument;
use crate::error::{Error, Result};
use crate::model::{document_code, forward_backward, widen, BinaryCode, Gradients, ModelKind, ModelParams, SoftmaxSupport};

#[derive(Debug, Clone, PartialEq)]
pub struct InferredDoc {
    pub doc_id: String,
    /// `None` only for plain PV-DBOW models.
    pub code: Option<BinaryCode>,
    /// The optimized real-valued document vector.
    pub vector: Vec<f32>,
    /// No training example could be formed; the output comes from the
    /// initial vector.
    pub empty: bool,
}

/// Infers document vectors and codes for `docs` with every model weight
/// frozen. Documents are independent: each gets its own RNG stream, a fresh
/// uniform initialization and fresh AdaGrad accumulators, so results do not
/// depend on the number of rayon threads.
pub fn infer_codes(params: &ModelParams, docs: &[CorpusDocument], cfg: &TrainConfig) -> Result<Vec<InferredDoc>> {
    cfg.validate()?;
    if cfg.mode != RunMode::Infer {
        return Err(Error::InvalidConfig("infer_codes requires mode=infer".into()));
    }
    params.shape.validate()?;
    check_documents(docs, params.shape.vocab_size)?;
    let sampler = build_sampler(&params.vocabulary, cfg)?;
    docs.par_iter()
        .enumerate()
        .map(|(i, doc)| infer_one(params, &sampler, cfg, i, doc))
        .collect()
}

fn infer_one(
    params: &ModelParams,
    sampler: &SamplerTable,
    cfg: &TrainConfig,
    index: usize,
    doc: &CorpusDocument,
) -> Result<InferredDoc> {
    let shape = params.shape;
    let d = shape.doc_dim;
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(cfg.seed, STREAM_INFER, index as u64));
    let mut vector: Vec<f64> = crate::model::Matrix::uniform(1, d, shape.doc_init_range(), &mut rng)
        .into_vec()
        .into_iter()
        .map(f64::from)
        .collect();
    let mut acc = vec![0.0; d];

    let unigrams = doc.unigram_terms();
    let examples: Vec<(u32, &[u32])> = match shape.kind {
        ModelKind::BinaryPvdm => {
            let w = shape.context_window;
            (w..unigrams.len()).map(|p| (unigrams[p], &unigrams[p - w..p])).collect()
        }
        _ => doc.terms.iter().map(|&t| (t, &[][..])).collect(),
    };

    let mut g = Gradients::new();
    let mut support = SoftmaxSupport::default();
    let mut input = vec![0.0; shape.input_width()];
    let mut word = vec![0.0; shape.word_dim];
    for _ in 0..cfg.epochs {
        for &(target, context) in &examples {
            input[..d].copy_from_slice(&vector);
            if let Some(words) = &params.word_embeddings {
                for (k, &id) in context.iter().enumerate() {
                    widen(words.row(id as usize), &mut word);
                    let start = d + k * shape.word_dim;
                    input[start..start + shape.word_dim].copy_from_slice(&word);
                }
            }
            sampler.draw_support(target, cfg.softmax, &mut rng, &mut support);
            forward_backward(params, &input, &support, shape.kind.activation(), &mut g)?;
            adagrad_update(&mut vector, &g.input[..d], &mut acc, cfg.learning_rate, cfg.adagrad_epsilon)?;
        }
    }
    // the stored vector is f32, so codes are computed from the rounded copy
    let vector: Vec<f32> = vector.iter().map(|&v| v as f32).collect();
    let mut wide = vec![0.0; d];
    widen(&vector, &mut wide);
    let code = document_code(params, &wide)?;
    Ok(InferredDoc {
        doc_id: doc.doc_id.clone(),
        code,
        vector,
        empty: examples.is_empty(),
    })
}
