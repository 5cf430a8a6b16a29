//! Text ingestion: tokenization, vocabularies and encoded document sets.

mod documents;
pub mod loaders;
mod tokenize;
mod vocab;

pub use documents::{
    build_corpus, count_terms, encode_documents, encode_for_inference, filter_test_labels, read_jsonl, split_corpus, write_jsonl, Corpus,
    CorpusDocument, CorpusRecord, EncodeReport, Labeled, PipelineOptions, RelevanceMode, SourceRecord, Split,
    SplitPolicy,
};
pub use tokenize::{document_terms, english_stopwords, extract_bigrams, tokenize, MAX_TOKEN_CHARS, MIN_TOKEN_CHARS};
pub use vocab::{TermCounts, Vocabulary};
