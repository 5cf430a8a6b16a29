use std::collections::HashSet;

pub const MIN_TOKEN_CHARS: usize = 2;
pub const MAX_TOKEN_CHARS: usize = 15;

static ENGLISH_STOPWORDS: &str = include_str!("stopwords.txt");

/// The bundled English stopword list.
pub fn english_stopwords() -> HashSet<String> {
    ENGLISH_STOPWORDS
        .lines()
        .map(str::trim)
        .filter(|w| !w.is_empty())
        .map(str::to_owned)
        .collect()
}

/// Splits text into lowercased runs of Unicode letters and drops stopwords
/// and tokens outside the accepted length range. Digits and punctuation act
/// as separators.
pub fn tokenize(raw_text: &str, stopwords: &HashSet<String>) -> Vec<String> {
    raw_text
        .to_lowercase()
        .split(|c: char| !c.is_alphabetic())
        .filter(|run| {
            let chars = run.chars().count();
            (MIN_TOKEN_CHARS..=MAX_TOKEN_CHARS).contains(&chars) && !stopwords.contains(*run)
        })
        .map(str::to_owned)
        .collect()
}

/// Adjacent token pairs joined with `_`, measured after filtering.
pub fn extract_bigrams<S: AsRef<str>>(tokens: &[S]) -> Vec<String> {
    tokens
        .windows(2)
        .map(|pair| format!("{}_{}", pair[0].as_ref(), pair[1].as_ref()))
        .collect()
}

/// Unigrams in text order followed by bigrams when requested.
pub fn document_terms(raw_text: &str, stopwords: &HashSet<String>, include_bigrams: bool) -> Vec<String> {
    let mut terms = tokenize(raw_text, stopwords);
    if include_bigrams {
        let bigrams = extract_bigrams(&terms);
        terms.extend(bigrams);
    }
    terms
}
