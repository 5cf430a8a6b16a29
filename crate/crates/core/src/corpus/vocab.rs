use std::collections::HashMap;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

const HEADER_TAG: &str = "BPV-VOCAB";
const HEADER_VERSION: &str = "v1";

/// Term frequencies gathered over one or more document shards.
#[derive(Debug, Clone, Default)]
pub struct TermCounts {
    counts: HashMap<String, u64>,
    total: u64,
}

impl TermCounts {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_document<S: AsRef<str>>(&mut self, terms: &[S]) {
        for term in terms {
            let term = term.as_ref();
            if let Some(count) = self.counts.get_mut(term) {
                *count += 1;
            } else {
                self.counts.insert(term.to_owned(), 1);
            }
        }
        self.total += terms.len() as u64;
    }

    /// Sums another shard's counts into this one.
    pub fn merge(&mut self, other: TermCounts) {
        for (term, count) in other.counts {
            *self.counts.entry(term).or_insert(0) += count;
        }
        self.total += other.total;
    }

    pub fn get(&self, term: &str) -> u64 {
        self.counts.get(term).copied().unwrap_or(0)
    }

    /// Total number of term occurrences seen.
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn distinct(&self) -> usize {
        self.counts.len()
    }
}

impl<S: AsRef<str>> FromIterator<(S, u64)> for TermCounts {
    fn from_iter<I: IntoIterator<Item = (S, u64)>>(iter: I) -> Self {
        let mut out = TermCounts::new();
        for (term, count) in iter {
            *out.counts.entry(term.as_ref().to_owned()).or_insert(0) += count;
            out.total += count;
        }
        out
    }
}

/// Dense term ↔ id mapping ordered by descending frequency.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    entries: Vec<(String, u64)>,
    index: HashMap<String, u32>,
    include_bigrams: bool,
}

impl Vocabulary {
    /// Keeps every term with at least `min_count` occurrences. Ids follow
    /// descending count, ties broken lexicographically.
    pub fn build(counts: &TermCounts, min_count: u64, include_bigrams: bool) -> Result<Self> {
        if min_count == 0 {
            return Err(Error::InvalidConfig("min_count must be at least 1".into()));
        }
        let mut entries: Vec<(String, u64)> = counts
            .counts
            .iter()
            .filter(|(_, &c)| c >= min_count)
            .map(|(t, &c)| (t.clone(), c))
            .collect();
        if entries.is_empty() {
            return Err(Error::EmptyVocabulary { min_count });
        }
        entries.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        Ok(Self::from_entries(entries, include_bigrams))
    }

    fn from_entries(entries: Vec<(String, u64)>, include_bigrams: bool) -> Self {
        let index = entries
            .iter()
            .enumerate()
            .map(|(i, (t, _))| (t.clone(), i as u32))
            .collect();
        Vocabulary {
            entries,
            index,
            include_bigrams,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn includes_bigrams(&self) -> bool {
        self.include_bigrams
    }

    pub fn id(&self, term: &str) -> Option<u32> {
        self.index.get(term).copied()
    }

    pub fn term(&self, id: u32) -> Option<&str> {
        self.entries.get(id as usize).map(|(t, _)| t.as_str())
    }

    pub fn count(&self, id: u32) -> Option<u64> {
        self.entries.get(id as usize).map(|(_, c)| *c)
    }

    pub fn entries(&self) -> &[(String, u64)] {
        &self.entries
    }

    pub fn counts(&self) -> impl Iterator<Item = u64> + '_ {
        self.entries.iter().map(|(_, c)| *c)
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(
            out,
            "{HEADER_TAG} {HEADER_VERSION} {} {}",
            self.entries.len(),
            self.include_bigrams
        )?;
        for (term, count) in &self.entries {
            writeln!(out, "{term}\t{count}")?;
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to a Vec cannot fail");
        buf
    }

    pub fn read_from<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::format("vocabulary line 1", "missing header"))??;
        let fields: Vec<&str> = header.split(' ').collect();
        if fields.len() != 4 || fields[0] != HEADER_TAG || fields[1] != HEADER_VERSION {
            return Err(Error::format("vocabulary line 1", format!("bad header {header:?}")));
        }
        let size: usize = fields[2]
            .parse()
            .map_err(|_| Error::format("vocabulary line 1", "bad vocabulary size"))?;
        let include_bigrams: bool = fields[3]
            .parse()
            .map_err(|_| Error::format("vocabulary line 1", "bad bigram flag"))?;

        let mut entries = Vec::with_capacity(size);
        for (i, line) in lines.enumerate() {
            let line = line?;
            let location = || format!("vocabulary line {}", i + 2);
            if entries.len() == size {
                if line.is_empty() {
                    continue;
                }
                return Err(Error::format(location(), "more entries than declared"));
            }
            let (term, count) = line
                .split_once('\t')
                .ok_or_else(|| Error::format(location(), "expected term<TAB>count"))?;
            let count: u64 = count
                .parse()
                .map_err(|_| Error::format(location(), "bad count"))?;
            entries.push((term.to_owned(), count));
        }
        if entries.len() != size {
            return Err(Error::format(
                "vocabulary",
                format!("declared {size} entries, found {}", entries.len()),
            ));
        }
        let vocab = Self::from_entries(entries, include_bigrams);
        if vocab.index.len() != vocab.entries.len() {
            return Err(Error::format("vocabulary", "duplicate terms"));
        }
        Ok(vocab)
    }
}
