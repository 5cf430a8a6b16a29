use std::collections::{BTreeSet, HashMap, HashSet};
use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tokenize::{document_terms, extract_bigrams, tokenize};
use super::vocab::{TermCounts, Vocabulary};
use crate::error::{Error, Result};

/// One line of the corpus interchange file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusRecord {
    pub id: String,
    pub text: String,
    pub labels: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Split {
    Train,
    Test,
}

/// A record together with the split assigned by the source collection, if any.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceRecord {
    pub record: CorpusRecord,
    pub reference_split: Option<Split>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SplitPolicy {
    /// Keep the split shipped with the collection.
    Reference,
    /// Hold out `test_fraction` of the documents, chosen by a seeded shuffle.
    Fraction { test_fraction: f64, seed: u64 },
}

impl SplitPolicy {
    /// Half of the collection for training, half for evaluation.
    pub fn rcv1(seed: u64) -> Self {
        SplitPolicy::Fraction {
            test_fraction: 0.5,
            seed,
        }
    }

    /// 10% held out for testing.
    pub fn wikipedia(seed: u64) -> Self {
        SplitPolicy::Fraction {
            test_fraction: 0.1,
            seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RelevanceMode {
    /// Relevant iff the label sets are equal (single-label collections).
    SameLabel,
    /// Graded: fraction of overlapping labels.
    LabelOverlap,
    /// Relevant iff at least one label is shared.
    SharedAnyLabel,
}

/// A document encoded against a vocabulary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusDocument {
    pub doc_id: String,
    /// Unigram ids in text order, followed by bigram ids when enabled.
    pub terms: Vec<u32>,
    /// Length of the unigram prefix of `terms`.
    pub unigrams: usize,
    pub labels: Vec<String>,
}

impl CorpusDocument {
    pub fn unigram_terms(&self) -> &[u32] {
        &self.terms[..self.unigrams]
    }
}

#[derive(Debug, Clone)]
pub struct Corpus {
    pub vocabulary: Vocabulary,
    pub train_docs: Vec<CorpusDocument>,
    pub test_docs: Vec<CorpusDocument>,
    pub relevance_mode: RelevanceMode,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EncodeReport {
    pub encoded: usize,
    /// Ids of documents left without any in-vocabulary term.
    pub excluded: Vec<String>,
    pub oov_occurrences: u64,
}

#[derive(Debug, Clone, Copy)]
pub struct PipelineOptions {
    pub include_bigrams: bool,
    pub min_count: u64,
}

/// Counts unigram (and optionally bigram) occurrences over raw documents.
pub fn count_terms(records: &[CorpusRecord], stopwords: &HashSet<String>, include_bigrams: bool) -> TermCounts {
    records
        .par_iter()
        .fold(TermCounts::new, |mut acc, rec| {
            acc.add_document(&document_terms(&rec.text, stopwords, include_bigrams));
            acc
        })
        .reduce(TermCounts::new, |mut a, b| {
            a.merge(b);
            a
        })
}

/// Maps each record's terms to vocabulary ids. Out-of-vocabulary terms are
/// dropped; documents that end up empty are excluded and listed in the report.
pub fn encode_documents(
    records: &[CorpusRecord],
    vocabulary: &Vocabulary,
    stopwords: &HashSet<String>,
) -> (Vec<CorpusDocument>, EncodeReport) {
    encode(records, vocabulary, stopwords, false)
}

/// Like [`encode_documents`], but empty documents are kept (with no terms)
/// and listed in `excluded`, so every record gets an output.
pub fn encode_for_inference(
    records: &[CorpusRecord],
    vocabulary: &Vocabulary,
    stopwords: &HashSet<String>,
) -> (Vec<CorpusDocument>, EncodeReport) {
    encode(records, vocabulary, stopwords, true)
}

fn encode(
    records: &[CorpusRecord],
    vocabulary: &Vocabulary,
    stopwords: &HashSet<String>,
    keep_empty: bool,
) -> (Vec<CorpusDocument>, EncodeReport) {
    let encoded: Vec<(Option<CorpusDocument>, u64, &str)> = records
        .par_iter()
        .map(|rec| {
            let tokens = tokenize(&rec.text, stopwords);
            let mut terms: Vec<u32> = tokens.iter().filter_map(|t| vocabulary.id(t)).collect();
            let unigrams = terms.len();
            let mut seen = tokens.len();
            if vocabulary.includes_bigrams() {
                let bigrams = extract_bigrams(&tokens);
                seen += bigrams.len();
                terms.extend(bigrams.iter().filter_map(|b| vocabulary.id(b)));
            }
            let oov = (seen - terms.len()) as u64;
            let doc = (keep_empty || !terms.is_empty()).then(|| CorpusDocument {
                doc_id: rec.id.clone(),
                terms,
                unigrams,
                labels: normalize_labels(&rec.labels),
            });
            (doc, oov, rec.id.as_str())
        })
        .collect();

    let mut report = EncodeReport::default();
    let mut docs = Vec::with_capacity(encoded.len());
    for (doc, oov, id) in encoded {
        report.oov_occurrences += oov;
        match doc {
            Some(d) => {
                if d.terms.is_empty() {
                    report.excluded.push(id.to_owned());
                }
                docs.push(d)
            }
            None => report.excluded.push(id.to_owned()),
        }
    }
    report.encoded = docs.len();
    (docs, report)
}

fn normalize_labels(labels: &[String]) -> Vec<String> {
    labels
        .iter()
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

/// Splits records into (train, test). Fraction splits depend only on the
/// seed and the record order.
pub fn split_corpus(records: Vec<SourceRecord>, policy: SplitPolicy) -> Result<(Vec<CorpusRecord>, Vec<CorpusRecord>)> {
    match policy {
        SplitPolicy::Reference => {
            let mut train = Vec::new();
            let mut test = Vec::new();
            for r in records {
                match r.reference_split {
                    Some(Split::Train) => train.push(r.record),
                    Some(Split::Test) => test.push(r.record),
                    None => {
                        return Err(Error::InvalidConfig(format!(
                            "record {:?} has no reference split",
                            r.record.id
                        )))
                    }
                }
            }
            Ok((train, test))
        }
        SplitPolicy::Fraction { test_fraction, seed } => {
            if !(test_fraction > 0.0 && test_fraction < 1.0) {
                return Err(Error::InvalidConfig(format!(
                    "test fraction must lie in (0, 1), got {test_fraction}"
                )));
            }
            let n = records.len();
            let mut order: Vec<usize> = (0..n).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for i in (1..n).rev() {
                let j = rng.random_range(0..=i as u64) as usize;
                order.swap(i, j);
            }
            let n_test = (test_fraction * n as f64).round() as usize;
            let mut is_test = vec![false; n];
            for &i in &order[..n_test] {
                is_test[i] = true;
            }
            let mut train = Vec::with_capacity(n - n_test);
            let mut test = Vec::with_capacity(n_test);
            for (r, t) in records.into_iter().zip(is_test) {
                if t {
                    test.push(r.record);
                } else {
                    train.push(r.record);
                }
            }
            Ok((train, test))
        }
    }
}

/// Removes labels carried by fewer than `min_docs_per_label` test documents,
/// then drops documents left without labels.
pub fn filter_test_labels<T: Labeled>(docs: Vec<T>, min_docs_per_label: usize) -> Vec<T> {
    let mut freq: HashMap<String, usize> = HashMap::new();
    for d in &docs {
        for l in d.labels() {
            *freq.entry(l.clone()).or_insert(0) += 1;
        }
    }
    docs.into_iter()
        .filter_map(|mut d| {
            d.labels_mut()
                .retain(|l| freq.get(l).copied().unwrap_or(0) >= min_docs_per_label);
            (!d.labels().is_empty()).then_some(d)
        })
        .collect()
}

pub trait Labeled {
    fn labels(&self) -> &[String];
    fn labels_mut(&mut self) -> &mut Vec<String>;
}

impl Labeled for CorpusRecord {
    fn labels(&self) -> &[String] {
        &self.labels
    }
    fn labels_mut(&mut self) -> &mut Vec<String> {
        &mut self.labels
    }
}

impl Labeled for CorpusDocument {
    fn labels(&self) -> &[String] {
        &self.labels
    }
    fn labels_mut(&mut self) -> &mut Vec<String> {
        &mut self.labels
    }
}

/// Builds the vocabulary from the training split and encodes both splits.
pub fn build_corpus(
    train: &[CorpusRecord],
    test: &[CorpusRecord],
    stopwords: &HashSet<String>,
    options: PipelineOptions,
    relevance_mode: RelevanceMode,
) -> Result<(Corpus, EncodeReport, EncodeReport)> {
    let counts = count_terms(train, stopwords, options.include_bigrams);
    let vocabulary = Vocabulary::build(&counts, options.min_count, options.include_bigrams)?;
    let (train_docs, train_report) = encode_documents(train, &vocabulary, stopwords);
    let (test_docs, test_report) = encode_documents(test, &vocabulary, stopwords);
    let train_ids: HashSet<&str> = train_docs.iter().map(|d| d.doc_id.as_str()).collect();
    if let Some(dup) = test_docs.iter().find(|d| train_ids.contains(d.doc_id.as_str())) {
        return Err(Error::format(
            format!("document {:?}", dup.doc_id),
            "appears in both train and test splits",
        ));
    }
    Ok((
        Corpus {
            vocabulary,
            train_docs,
            test_docs,
            relevance_mode,
        },
        train_report,
        test_report,
    ))
}

pub fn read_jsonl<R: BufRead>(input: R, source: &str) -> Result<Vec<CorpusRecord>> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: CorpusRecord = serde_json::from_str(&line)
            .map_err(|e| Error::format(format!("{source}:{}", i + 1), e.to_string()))?;
        out.push(rec);
    }
    Ok(out)
}

pub fn write_jsonl<W: Write>(mut out: W, records: &[CorpusRecord]) -> Result<()> {
    for rec in records {
        serde_json::to_writer(&mut out, rec).map_err(std::io::Error::from)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(id: &str, text: &str, labels: &[&str]) -> CorpusRecord {
        CorpusRecord {
            id: id.into(),
            text: text.into(),
            labels: labels.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn vocab_of(terms: &[&str]) -> Vocabulary {
        let counts: TermCounts = terms.iter().map(|&t| (t, 1u64)).collect();
        Vocabulary::build(&counts, 1, false).unwrap()
    }

    #[test]
    fn oov_terms_dropped() {
        let v = vocab_of(&["cat"]);
        let (docs, report) = encode_documents(&[rec("d1", "cat flap", &["x"])], &v, &HashSet::new());
        assert_eq!(docs[0].terms, vec![0]);
        assert_eq!(report.oov_occurrences, 1);
    }

    #[test]
    fn all_oov_document_excluded() {
        let v = vocab_of(&["cat"]);
        let (docs, report) = encode_documents(
            &[rec("d1", "cat", &["x"]), rec("d2", "dog bird", &["y"])],
            &v,
            &HashSet::new(),
        );
        assert_eq!(docs.len(), 1);
        assert_eq!(report.excluded, vec!["d2".to_string()]);
        assert_eq!(report.encoded, 1);

        let (docs, report) = encode_for_inference(&[rec("d2", "dog bird", &["y"])], &v, &HashSet::new());
        assert_eq!(docs.len(), 1);
        assert!(docs[0].terms.is_empty());
        assert_eq!(report.excluded, vec!["d2".to_string()]);
    }

    #[test]
    fn bigrams_follow_unigrams() {
        let records = [rec("d", "cat flap cat flap", &["x"])];
        let counts = count_terms(&records, &HashSet::new(), true);
        let v = Vocabulary::build(&counts, 1, true).unwrap();
        let (docs, _) = encode_documents(&records, &v, &HashSet::new());
        let d = &docs[0];
        assert_eq!(d.unigrams, 4);
        let terms: Vec<&str> = d.terms.iter().map(|&i| v.term(i).unwrap()).collect();
        assert_eq!(
            terms,
            ["cat", "flap", "cat", "flap", "cat_flap", "flap_cat", "cat_flap"]
        );
    }

    fn tagged(n: usize) -> Vec<SourceRecord> {
        (0..n)
            .map(|i| SourceRecord {
                record: rec(&format!("d{i}"), "text", &["l"]),
                reference_split: Some(if i % 3 == 0 { Split::Test } else { Split::Train }),
            })
            .collect()
    }

    #[test]
    fn fraction_split_is_deterministic_and_exhaustive() {
        let policy = SplitPolicy::Fraction {
            test_fraction: 0.3,
            seed: 7,
        };
        let (a_train, a_test) = split_corpus(tagged(100), policy).unwrap();
        let (b_train, b_test) = split_corpus(tagged(100), policy).unwrap();
        assert_eq!(a_train, b_train);
        assert_eq!(a_test, b_test);
        assert_eq!(a_test.len(), 30);
        assert_eq!(a_train.len(), 70);
        let all: HashSet<_> = a_train.iter().chain(&a_test).map(|r| r.id.clone()).collect();
        assert_eq!(all.len(), 100);
    }

    #[test]
    fn named_policies() {
        assert_eq!(
            SplitPolicy::rcv1(1),
            SplitPolicy::Fraction { test_fraction: 0.5, seed: 1 }
        );
        assert_eq!(
            SplitPolicy::wikipedia(1),
            SplitPolicy::Fraction { test_fraction: 0.1, seed: 1 }
        );
    }

    #[test]
    fn reference_split_preserved() {
        let (train, test) = split_corpus(tagged(9), SplitPolicy::Reference).unwrap();
        assert_eq!(test.len(), 3);
        assert_eq!(train.len(), 6);
        assert_eq!(test[0].id, "d0");
    }

    #[test]
    fn bad_fraction_rejected() {
        let p = SplitPolicy::Fraction { test_fraction: 1.0, seed: 0 };
        assert!(split_corpus(tagged(3), p).is_err());
    }

    #[test]
    fn label_filter_threshold() {
        let mut docs: Vec<CorpusRecord> = (0..19).map(|i| rec(&format!("a{i}"), "", &["L", "M"])).collect();
        docs.push(rec("only", "", &["L"]));
        docs.push(rec("m", "", &["M"]));
        let filtered = filter_test_labels(docs.clone(), 21);
        // L appears on 20 documents, M on 20; both below 21
        assert!(filtered.is_empty());
        let filtered = filter_test_labels(docs.clone(), 20);
        assert_eq!(filtered.len(), 21);
        assert_eq!(filter_test_labels(docs.clone(), 1), docs);
    }

    #[test]
    fn doc_losing_all_labels_removed() {
        let mut docs: Vec<CorpusRecord> = (0..20).map(|i| rec(&format!("a{i}"), "", &["big"])).collect();
        docs.push(rec("rare", "", &["small"]));
        docs.push(rec("mixed", "", &["small", "big"]));
        let filtered = filter_test_labels(docs, 20);
        assert!(filtered.iter().all(|d| d.id != "rare"));
        let mixed = filtered.iter().find(|d| d.id == "mixed").unwrap();
        assert_eq!(mixed.labels, vec!["big".to_string()]);
    }

    #[test]
    fn jsonl_missing_text_names_line() {
        let input = "{\"id\":\"a\",\"text\":\"x\",\"labels\":[]}\n{\"id\":\"b\",\"labels\":[]}\n";
        match read_jsonl(input.as_bytes(), "c.jsonl").unwrap_err() {
            Error::Format { location, .. } => assert_eq!(location, "c.jsonl:2"),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn jsonl_round_trip() {
        let records = vec![rec("a", "some \"quoted\" text", &["x", "y"]), rec("b", "", &[])];
        let mut buf = Vec::new();
        write_jsonl(&mut buf, &records).unwrap();
        assert_eq!(read_jsonl(buf.as_slice(), "mem").unwrap(), records);
    }
}
