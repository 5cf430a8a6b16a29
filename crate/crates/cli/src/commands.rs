use std::collections::{BTreeSet, HashMap};
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use binpv::corpus::loaders::{self, SourceFormat};
use binpv::corpus::{
    build_corpus, encode_documents, encode_for_inference, english_stopwords, filter_test_labels, read_jsonl,
    split_corpus, write_jsonl, CorpusRecord, PipelineOptions, RelevanceMode, SplitPolicy, Vocabulary,
};
use binpv::eval::{evaluate, CodeIndex, OverlapDenominator, Ranker, RelevanceJudge};
use binpv::formats::{load_codes, load_vectors, save_codes, save_vectors};
use binpv::hashing::{itq_fit, Baseline, HyperplaneHasher, ITQ_ITERATIONS};
use binpv::model::{document_code, ModelKind, ModelParams};
use binpv::train::{infer_codes, train as train_model, ModelSpec, RunMode, SoftmaxMode, TrainConfig};
use binpv::Error;

use crate::args::{BaselineArgs, EvalArgs, ExportArgs, IngestArgs, InferArgs, TrainArgs};
use crate::settings::Settings;
use crate::CliError;

type CliResult<T = ()> = Result<T, CliError>;

fn parse<T: std::str::FromStr<Err = Error>>(s: &str) -> CliResult<T> {
    s.parse().map_err(CliError::from)
}

fn read_records(path: &Path) -> CliResult<Vec<CorpusRecord>> {
    let file = File::open(path).map_err(|e| Error::format(path.display().to_string(), e.to_string()))?;
    Ok(read_jsonl(BufReader::new(file), &path.display().to_string())?)
}

fn write_records(path: &Path, records: &[CorpusRecord]) -> CliResult {
    let mut out = BufWriter::new(File::create(path).map_err(Error::from)?);
    write_jsonl(&mut out, records)?;
    out.flush().map_err(Error::from)?;
    Ok(())
}

fn read_vocabulary(path: &Path) -> CliResult<Vocabulary> {
    let file = File::open(path).map_err(|e| Error::format(path.display().to_string(), e.to_string()))?;
    Ok(Vocabulary::read_from(BufReader::new(file))?)
}

fn run_file(output: &str) -> PathBuf {
    PathBuf::from(format!("{output}.run"))
}

fn softmax_mode(name: &str, negatives: usize) -> CliResult<SoftmaxMode> {
    match name {
        "sampled" => Ok(SoftmaxMode::Sampled { negatives }),
        "uniform" => Ok(SoftmaxMode::UniformWithoutReplacement { negatives }),
        "full" => Ok(SoftmaxMode::Full),
        other => Err(CliError::Usage(format!("unknown softmax mode {other:?} (sampled, uniform, full)"))),
    }
}

fn available_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn resolve_workers(s: &mut Settings, workers: Option<usize>, deterministic: Option<bool>) -> CliResult<usize> {
    let deterministic = s.get("deterministic", deterministic, false)?;
    let workers = s.get("workers", workers, available_workers())?;
    if workers == 0 {
        return Err(CliError::Usage("--workers must be positive".into()));
    }
    Ok(if deterministic { 1 } else { workers })
}

fn set_threads(workers: usize) {
    // only the first call in a process takes effect
    let _ = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global();
}

pub fn ingest(a: IngestArgs) -> CliResult {
    let mut s = Settings::load(a.config.as_deref())?;
    let source: String = s.require("source", a.source)?;
    let format: String = s.require("format", a.format)?;
    let out: String = s.require("out", a.out)?;
    let bigrams = s.get("bigrams", a.bigrams, false)?;
    let min_count = s.get("min-count", a.min_count, 1)?;
    let test_fraction = s.get_opt("test-fraction", a.test_fraction)?;
    let min_label_docs = s.get("min-label-docs", a.min_label_docs, 1)?;
    let seed = s.get("seed", a.seed, 0)?;
    s.check_unused()?;

    let format: SourceFormat = parse(&format)?;
    let records = loaders::load(Path::new(&source), format)?;
    let has_reference = !records.is_empty() && records.iter().all(|r| r.reference_split.is_some());
    let policy = match (test_fraction, has_reference) {
        (None, true) => SplitPolicy::Reference,
        (f, _) => SplitPolicy::Fraction {
            test_fraction: f.unwrap_or(if format == SourceFormat::Rcv1 { 0.5 } else { 0.1 }),
            seed,
        },
    };
    let (train, test) = split_corpus(records, policy)?;
    let test = filter_test_labels(test, min_label_docs);
    let stopwords = english_stopwords();
    let options = PipelineOptions {
        include_bigrams: bigrams,
        min_count,
    };
    let (corpus, train_report, test_report) = build_corpus(&train, &test, &stopwords, options, RelevanceMode::SameLabel)?;

    let dir = PathBuf::from(&out);
    fs::create_dir_all(&dir).map_err(Error::from)?;
    write_records(&dir.join("train.jsonl"), &train)?;
    write_records(&dir.join("test.jsonl"), &test)?;
    fs::write(dir.join("vocab.txt"), corpus.vocabulary.to_bytes()).map_err(Error::from)?;
    let labels: BTreeSet<&String> = train.iter().chain(&test).flat_map(|r| &r.labels).collect();
    let stats = format!(
        "train_docs {}\ntest_docs {}\nlabels {}\nvocabulary {}\ntrain_empty {}\ntest_empty {}\ntest_oov_occurrences {}\n",
        train.len(),
        test.len(),
        labels.len(),
        corpus.vocabulary.len(),
        train_report.excluded.len(),
        test_report.excluded.len(),
        test_report.oov_occurrences,
    );
    fs::write(dir.join("stats.txt"), &stats).map_err(Error::from)?;
    print!("{stats}");
    s.persist("ingest", &dir.join("ingest.run"))
}

pub fn train(a: TrainArgs) -> CliResult {
    let mut s = Settings::load(a.config.as_deref())?;
    let corpus: String = s.require("corpus", a.corpus)?;
    let kind: String = s.get("model", a.model, "binary-pvdbow".into())?;
    let kind: ModelKind = parse(&kind)?;
    let bits = s.get("bits", a.bits, 128)?;
    let default_dim = if kind == ModelKind::RealBinaryPvdbow { 300 } else { bits };
    let dim = s.get("dim", a.dim, default_dim)?;
    let spec = match kind {
        ModelKind::BinaryPvdm => {
            let window = s.get("window", a.window, 1)?;
            let word_dim = s.get("word-dim", a.word_dim, bits)?;
            ModelSpec {
                doc_dim: dim,
                word_dim,
                ..ModelSpec::binary_pvdm(bits, window)
            }
        }
        ModelKind::RealBinaryPvdbow => ModelSpec::real_binary(dim, bits),
        ModelKind::BinaryPvdbow | ModelKind::Pvdbow => ModelSpec {
            kind,
            doc_dim: dim,
            ..ModelSpec::binary_pvdbow(bits)
        },
    };
    let defaults = TrainConfig::default();
    let negatives = s.get("neg", a.neg, 64)?;
    let softmax: String = s.get("softmax", a.softmax, "sampled".into())?;
    let workers = resolve_workers(&mut s, a.workers, a.deterministic)?;
    let cfg = TrainConfig {
        epochs: s.get("epochs", a.epochs, defaults.epochs)?,
        learning_rate: s.get("lr", a.lr, defaults.learning_rate)?,
        dropout: s.get("dropout", a.dropout, defaults.dropout)?,
        softmax: softmax_mode(&softmax, negatives)?,
        seed: s.get("seed", a.seed, defaults.seed)?,
        workers,
        ..defaults
    };
    let out: String = s.require("out", a.out)?;
    let report_path: String = s.get("report", a.report, format!("{out}.report.jsonl"))?;
    let checkpoints = s.get("checkpoints", a.checkpoints, false)?;
    s.check_unused()?;

    let dir = Path::new(&corpus);
    let vocabulary = read_vocabulary(&dir.join("vocab.txt"))?;
    let records = read_records(&dir.join("train.jsonl"))?;
    let (docs, report) = encode_documents(&records, &vocabulary, &english_stopwords());
    eprintln!(
        "training {kind} on {} documents ({} empty skipped), vocabulary {}",
        docs.len(),
        report.excluded.len(),
        vocabulary.len()
    );
    let mut save_checkpoint = |epoch: usize, p: &ModelParams| p.save(Path::new(&format!("{out}.epoch{epoch}")));
    let checkpoint: Option<binpv::train::Checkpoint<'_>> = checkpoints.then_some(&mut save_checkpoint as _);
    let (params, train_report) = train_model(&docs, vocabulary, spec, &cfg, checkpoint)?;
    params.save(Path::new(&out))?;
    let mut f = BufWriter::new(File::create(&report_path).map_err(Error::from)?);
    train_report.write_jsonl(&mut f)?;
    f.flush().map_err(Error::from)?;
    if let Some(last) = train_report.epochs.last() {
        println!("epochs {} final_mean_loss {:.6}", last.epoch, last.mean_loss);
    }
    s.persist("train", &run_file(&out))
}

pub fn infer(a: InferArgs) -> CliResult {
    let mut s = Settings::load(a.config.as_deref())?;
    let model_path: String = s.require("model", a.model)?;
    let input: String = s.require("input", a.input)?;
    let out: String = s.require("out", a.out)?;
    let vectors_out: Option<String> = s.get_opt("vectors-out", a.vectors_out)?;
    let defaults = TrainConfig::inference();
    let negatives = s.get("neg", a.neg, 64)?;
    let softmax: String = s.get("softmax", a.softmax, "sampled".into())?;
    let workers = resolve_workers(&mut s, a.workers, a.deterministic)?;
    let cfg = TrainConfig {
        epochs: s.get("epochs", a.epochs, defaults.epochs)?,
        learning_rate: s.get("lr", a.lr, defaults.learning_rate)?,
        softmax: softmax_mode(&softmax, negatives)?,
        seed: s.get("seed", a.seed, defaults.seed)?,
        dropout: 0.0,
        workers,
        mode: RunMode::Infer,
        ..defaults
    };
    s.check_unused()?;
    set_threads(workers);

    let params = ModelParams::load(Path::new(&model_path))?;
    let records = read_records(Path::new(&input))?;
    let (docs, report) = encode_for_inference(&records, &params.vocabulary, &english_stopwords());
    let inferred = infer_codes(&params, &docs, &cfg)?;

    let kind = params.shape.kind;
    if kind.has_code() {
        let codes: Vec<_> = inferred
            .iter()
            .map(|d| (d.doc_id.clone(), d.code.clone().expect("code kinds emit codes")))
            .collect();
        save_codes(Path::new(&out), params.shape.code_bits, &codes)?;
    }
    let vectors_out = match (vectors_out, kind.has_real_vector()) {
        (Some(p), _) => Some(p),
        (None, true) => Some(format!("{out}.vecs")),
        (None, false) => None,
    };
    if let Some(path) = &vectors_out {
        let vectors: Vec<_> = inferred.iter().map(|d| (d.doc_id.clone(), d.vector.clone())).collect();
        save_vectors(Path::new(path), params.shape.doc_dim, &vectors)?;
    }
    println!(
        "documents {} empty {} oov_occurrences {}",
        inferred.len(),
        report.excluded.len(),
        report.oov_occurrences
    );
    for id in &report.excluded {
        eprintln!("empty document (code from initial vector): {id}");
    }
    let primary = if kind.has_code() { out } else { vectors_out.expect("vector kinds write vectors") };
    s.persist("infer", &run_file(&primary))
}

fn widen_all(records: &[(String, Vec<f32>)]) -> Vec<Vec<f64>> {
    records.iter().map(|(_, v)| v.iter().map(|&x| x as f64).collect()).collect()
}

pub fn baseline(a: BaselineArgs) -> CliResult {
    let mut s = Settings::load(a.config.as_deref())?;
    let vectors_path: String = s.require("vectors", a.vectors)?;
    let fit_path: Option<String> = s.get_opt("fit", a.fit)?;
    let method: String = s.require("method", a.method)?;
    let bits = s.require("bits", a.bits)?;
    let out: String = s.require("out", a.out)?;
    let save_model: Option<String> = s.get_opt("save-model", a.save_model)?;

    let (dim, records) = load_vectors(Path::new(&vectors_path))?;
    let hasher = match method.as_str() {
        "rhp" => {
            let seed = s.get("seed", a.seed, 0)?;
            Baseline::Rhp(HyperplaneHasher::new(dim, bits, seed)?)
        }
        "itq" => {
            let iterations = s.get("iterations", a.iterations, ITQ_ITERATIONS)?;
            let fit = match &fit_path {
                Some(p) => {
                    let (fit_dim, fit_records) = load_vectors(Path::new(p))?;
                    if fit_dim != dim {
                        return Err(Error::shape(dim, fit_dim).into());
                    }
                    widen_all(&fit_records)
                }
                None => widen_all(&records),
            };
            Baseline::Itq(itq_fit(&fit, bits, iterations)?)
        }
        other => return Err(CliError::Usage(format!("unknown baseline method {other:?} (rhp, itq)"))),
    };
    s.check_unused()?;

    let codes = hasher.hash_all(&widen_all(&records))?;
    let named: Vec<_> = records.iter().map(|(id, _)| id.clone()).zip(codes).collect();
    save_codes(Path::new(&out), bits, &named)?;
    if let Some(p) = save_model {
        hasher.save(Path::new(&p))?;
    }
    println!("{} codes {} bits {}", hasher.name(), named.len(), bits);
    s.persist("baseline", &run_file(&out))
}

fn judge_mode(name: &str) -> CliResult<RelevanceMode> {
    match name {
        "newsgroup" | "same-label" => Ok(RelevanceMode::SameLabel),
        "overlap" => Ok(RelevanceMode::LabelOverlap),
        "shared" => Ok(RelevanceMode::SharedAnyLabel),
        other => Err(CliError::Usage(format!("unknown judge {other:?} (newsgroup, overlap, shared)"))),
    }
}

fn mismatched(left: &[&str], right: &[&str]) -> Vec<String> {
    let l: BTreeSet<&str> = left.iter().copied().collect();
    let r: BTreeSet<&str> = right.iter().copied().collect();
    l.symmetric_difference(&r).map(|s| s.to_string()).collect()
}

pub fn eval(a: EvalArgs) -> CliResult {
    let mut s = Settings::load(a.config.as_deref())?;
    let codes_path: String = s.require("codes", a.codes)?;
    let labels_path: String = s.require("labels", a.labels)?;
    let vectors_path: Option<String> = s.get_opt("vectors", a.vectors)?;
    let rank: String = s.get("rank", a.rank, "hamming".into())?;
    let ranker = match rank.as_str() {
        "hamming" => Ranker::Hamming,
        "cosine" => Ranker::Cosine,
        "filter-rerank" => Ranker::FilterRerank {
            radius: s.get("radius", a.radius, 1)?,
        },
        other => return Err(CliError::Usage(format!("unknown ranking {other:?} (hamming, cosine, filter-rerank)"))),
    };
    let judge: String = s.get("judge", a.judge, "newsgroup".into())?;
    let mode = judge_mode(&judge)?;
    let denominator = match mode {
        RelevanceMode::LabelOverlap => match s.get("overlap", a.overlap, "union".to_string())?.as_str() {
            "union" => OverlapDenominator::Union,
            "query" => OverlapDenominator::Query,
            other => return Err(CliError::Usage(format!("unknown overlap denominator {other:?} (union, query)"))),
        },
        _ => OverlapDenominator::Union,
    };
    let report_path: String = s.get("report", a.report, format!("{codes_path}.eval.txt"))?;
    let pr_path: String = s.get("pr-csv", a.pr_csv, format!("{codes_path}.pr.csv"))?;
    let workers = s.get("workers", a.workers, available_workers())?;
    s.check_unused()?;
    set_threads(workers.max(1));
    if ranker != Ranker::Hamming && vectors_path.is_none() {
        return Err(CliError::Usage(format!("--rank {rank} needs --vectors")));
    }

    let (_, codes) = load_codes(Path::new(&codes_path))?;
    let records = read_records(Path::new(&labels_path))?;
    let code_ids: Vec<&str> = codes.iter().map(|(id, _)| id.as_str()).collect();
    let label_ids: Vec<&str> = records.iter().map(|r| r.id.as_str()).collect();
    let missing = mismatched(&code_ids, &label_ids);
    if !missing.is_empty() {
        return Err(Error::IdMismatch(missing).into());
    }
    let vectors = match &vectors_path {
        Some(p) => {
            let (_, vecs) = load_vectors(Path::new(p))?;
            let vec_ids: Vec<&str> = vecs.iter().map(|(id, _)| id.as_str()).collect();
            let missing = mismatched(&code_ids, &vec_ids);
            if !missing.is_empty() {
                return Err(Error::IdMismatch(missing).into());
            }
            let mut by_id: HashMap<String, Vec<f32>> = vecs.into_iter().collect();
            Some(
                codes
                    .iter()
                    .map(|(id, _)| by_id.remove(id).expect("ids checked"))
                    .collect::<Vec<_>>(),
            )
        }
        None => None,
    };

    let judge = RelevanceJudge::new(mode, records.into_iter().map(|r| (r.id, r.labels))).with_denominator(denominator);
    let mut index = CodeIndex::new(codes)?;
    if let Some(v) = &vectors {
        index = index.with_vectors(v)?;
    }
    let run = evaluate(&index, &judge, ranker, None)?;
    let report = run.report();
    print!("{report}");
    fs::write(&report_path, &report).map_err(Error::from)?;
    fs::write(&pr_path, run.pr_csv()).map_err(Error::from)?;
    s.persist("eval", &run_file(&report_path))
}

pub fn export_vectors(a: ExportArgs) -> CliResult {
    let mut s = Settings::load(a.config.as_deref())?;
    let model_path: String = s.require("model", a.model)?;
    let corpus: String = s.require("corpus", a.corpus)?;
    let out: String = s.require("out", a.out)?;
    let codes_out: Option<String> = s.get_opt("codes-out", a.codes_out)?;
    s.check_unused()?;

    let params = ModelParams::load(Path::new(&model_path))?;
    let embeddings = params
        .doc_embeddings
        .as_ref()
        .ok_or_else(|| Error::IncompatibleModel("model file holds no training document vectors".into()))?;
    let records = read_records(&Path::new(&corpus).join("train.jsonl"))?;
    let (docs, _) = encode_documents(&records, &params.vocabulary, &english_stopwords());
    if docs.len() != embeddings.rows() {
        return Err(Error::IncompatibleModel(format!(
            "model has {} training vectors but the corpus encodes to {} documents",
            embeddings.rows(),
            docs.len()
        ))
        .into());
    }
    let vectors: Vec<_> = docs
        .iter()
        .enumerate()
        .map(|(i, d)| (d.doc_id.clone(), embeddings.row(i).to_vec()))
        .collect();
    save_vectors(Path::new(&out), params.shape.doc_dim, &vectors)?;
    if let Some(path) = codes_out {
        if !params.shape.kind.has_code() {
            return Err(CliError::Usage(format!("{} models have no codes", params.shape.kind)));
        }
        let codes = vectors
            .iter()
            .map(|(id, v)| {
                let wide: Vec<f64> = v.iter().map(|&x| x as f64).collect();
                Ok((id.clone(), document_code(&params, &wide)?.expect("code kind")))
            })
            .collect::<Result<Vec<_>, Error>>()?;
        save_codes(Path::new(&path), params.shape.code_bits, &codes)?;
    }
    println!("vectors {} dim {}", vectors.len(), params.shape.doc_dim);
    s.persist("export-vectors", &run_file(&out))
}
