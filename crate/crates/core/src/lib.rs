//! Binary paragraph vectors: short binary document codes learned with
//! paragraph vector models, classical hashing baselines, and retrieval
//! evaluation.

pub mod container;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod formats;
pub mod hashing;
pub mod model;
pub mod train;

pub use corpus::{Corpus, CorpusDocument, CorpusRecord, RelevanceMode, Vocabulary};
pub use error::{Error, Result};
pub use eval::{evaluate, CodeIndex, EvalRun, Ranker, RelevanceJudge};
pub use hashing::{Baseline, HyperplaneHasher, ItqModel};
pub use model::{BinaryCode, ModelKind, ModelParams};
pub use train::{infer_codes, train, ModelSpec, SoftmaxMode, TrainConfig};
