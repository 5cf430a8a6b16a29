use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

const CONFIG_HELP: &str = "\
Every option can also be set in a --config file of `key = value` lines
(`#` starts a comment), where the key is the long flag name without the
dashes. Precedence: command line > config file > built-in default. Each run
writes its resolved settings next to its main output as `<output>.run`
(for ingest: `<out>/ingest.run`); passing that file back with --config
repeats the run.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric divergence.";

#[derive(Debug, Parser)]
#[command(name = "binpv", version, about = "Binary paragraph vectors for document retrieval", after_help = CONFIG_HELP)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load a raw corpus, split it and build the vocabulary.
    Ingest(IngestArgs),
    /// Train a paragraph vector model on an ingested corpus.
    Train(TrainArgs),
    /// Infer codes (and vectors) for documents with a trained model.
    Infer(InferArgs),
    /// Hash real-valued vectors with random hyperplanes or ITQ.
    Baseline(BaselineArgs),
    /// Rank documents and report MAP, NDCG@10 and precision-recall.
    Eval(EvalArgs),
    /// Write the training-document vectors stored in a model file.
    ExportVectors(ExportArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Corpus location.
    #[arg(long)]
    pub source: Option<String>,
    /// One of 20ng-dir, rcv1, jsonl.
    #[arg(long)]
    pub format: Option<String>,
    /// Output directory for train.jsonl, test.jsonl and vocab.txt.
    #[arg(long)]
    pub out: Option<String>,
    /// Add bigrams to the vocabulary.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub bigrams: Option<bool>,
    #[arg(long)]
    pub min_count: Option<u64>,
    /// Test share for corpora without a reference split (default 0.5 for
    /// rcv1, 0.1 otherwise).
    #[arg(long)]
    pub test_fraction: Option<f64>,
    /// Drop test labels carried by fewer documents than this.
    #[arg(long)]
    pub min_label_docs: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Directory written by `ingest`.
    #[arg(long)]
    pub corpus: Option<String>,
    /// binary-pvdbow, binary-pvdm, real-binary or pvdbow.
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub bits: Option<usize>,
    /// Document embedding size (real-binary: default 300; others: equals bits).
    #[arg(long)]
    pub dim: Option<usize>,
    /// One-sided context window for binary-pvdm.
    #[arg(long)]
    pub window: Option<usize>,
    /// Word embedding size for binary-pvdm (default: bits).
    #[arg(long)]
    pub word_dim: Option<usize>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub dropout: Option<f64>,
    /// Negative samples per prediction.
    #[arg(long)]
    pub neg: Option<usize>,
    /// sampled, uniform or full.
    #[arg(long)]
    pub softmax: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub workers: Option<usize>,
    /// Force a single worker for bit-reproducible output.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub deterministic: Option<bool>,
    /// Model file to write.
    #[arg(long)]
    pub out: Option<String>,
    /// Training report (one JSON object per epoch).
    #[arg(long)]
    pub report: Option<String>,
    /// Write `<out>.epoch<k>` after every epoch.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub checkpoints: Option<bool>,
}

#[derive(Debug, Args)]
pub struct InferArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub model: Option<String>,
    /// JSONL documents.
    #[arg(long)]
    pub input: Option<String>,
    /// Code file to write.
    #[arg(long)]
    pub out: Option<String>,
    /// Vector file to write (always written for real-binary and pvdbow;
    /// defaults to `<out>.vecs`).
    #[arg(long)]
    pub vectors_out: Option<String>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub neg: Option<usize>,
    #[arg(long)]
    pub softmax: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub deterministic: Option<bool>,
}

#[derive(Debug, Args)]
pub struct BaselineArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Vectors to hash.
    #[arg(long)]
    pub vectors: Option<String>,
    /// Vectors to fit ITQ on (default: --vectors).
    #[arg(long)]
    pub fit: Option<String>,
    /// rhp or itq.
    #[arg(long)]
    pub method: Option<String>,
    #[arg(long)]
    pub bits: Option<usize>,
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<String>,
    /// Also store the fitted hasher.
    #[arg(long)]
    pub save_model: Option<String>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub codes: Option<String>,
    /// JSONL records supplying the labels.
    #[arg(long)]
    pub labels: Option<String>,
    /// Real vectors for cosine and filter-rerank ranking.
    #[arg(long)]
    pub vectors: Option<String>,
    /// hamming, cosine or filter-rerank.
    #[arg(long)]
    pub rank: Option<String>,
    #[arg(long)]
    pub radius: Option<u32>,
    /// newsgroup, overlap or shared.
    #[arg(long)]
    pub judge: Option<String>,
    /// Denominator for overlap relevance: union or query.
    #[arg(long)]
    pub overlap: Option<String>,
    /// Aggregate report (also printed).
    #[arg(long)]
    pub report: Option<String>,
    /// Precision-recall CSV.
    #[arg(long)]
    pub pr_csv: Option<String>,
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub model: Option<String>,
    /// Directory written by `ingest`; supplies the training document ids.
    #[arg(long)]
    pub corpus: Option<String>,
    #[arg(long)]
    pub out: Option<String>,
    /// Also write the training-document codes.
    #[arg(long)]
    pub codes_out: Option<String>,
}
