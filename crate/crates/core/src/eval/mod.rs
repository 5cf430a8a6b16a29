//! Hamming and cosine retrieval, relevance judgments and IR metrics.

mod index;
mod judge;
mod metrics;
mod run;

pub use index::CodeIndex;
pub use judge::{OverlapDenominator, RelevanceJudge};
pub use metrics::{
    average_precision, average_precision_with_total, cosine, hamming, interpolated_precision, ndcg_at_k, pr_curve,
    RECALL_LEVELS,
};
pub use run::{evaluate, EvalRun, QueryResult, Ranker, NDCG_K};
