//! Readers that normalize the supported source collections into
//! [`SourceRecord`]s.
//!
//! * 20 Newsgroups "bydate" tree: `<root>/20news-bydate-{train,test}/<group>/<file>`
//!   (or `<root>/{train,test}/<group>/<file>`); the folder name is the label.
//! * RCV1-v2 token files (`.I <id>` / `.W` blocks) plus a topic qrels file
//!   with `<topic> <doc id> 1` lines.
//! * Corpus JSONL, one `{"id", "text", "labels"}` object per line.

use std::collections::HashMap;
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use super::documents::{read_jsonl, CorpusRecord, SourceRecord, Split};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceFormat {
    Newsgroups,
    Rcv1,
    Jsonl,
}

impl std::str::FromStr for SourceFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "20ng-dir" => Ok(SourceFormat::Newsgroups),
            "rcv1" => Ok(SourceFormat::Rcv1),
            "jsonl" => Ok(SourceFormat::Jsonl),
            other => Err(Error::InvalidConfig(format!("unknown source format {other:?}"))),
        }
    }
}

pub fn load(path: &Path, format: SourceFormat) -> Result<Vec<SourceRecord>> {
    match format {
        SourceFormat::Newsgroups => load_newsgroups(path),
        SourceFormat::Rcv1 => load_rcv1(path),
        SourceFormat::Jsonl => load_jsonl(path),
    }
}

/// Bytes are decoded as Latin-1 since the newsgroup posts are not valid UTF-8
/// throughout.
fn latin1(bytes: &[u8]) -> String {
    bytes.iter().map(|&b| b as char).collect()
}

fn sorted_entries(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut entries = fs::read_dir(dir)?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<Vec<_>>>()?;
    entries.sort();
    Ok(entries)
}

pub fn load_newsgroups(root: &Path) -> Result<Vec<SourceRecord>> {
    let candidates = [
        ("20news-bydate-train", "20news-bydate-test"),
        ("train", "test"),
    ];
    let (train_dir, test_dir) = candidates
        .iter()
        .map(|(a, b)| (root.join(a), root.join(b)))
        .find(|(a, b)| a.is_dir() && b.is_dir())
        .ok_or_else(|| {
            Error::format(
                root.display().to_string(),
                "expected 20news-bydate-train/ and 20news-bydate-test/ (or train/ and test/)",
            )
        })?;

    let mut out = Vec::new();
    for (dir, split, tag) in [(train_dir, Split::Train, "train"), (test_dir, Split::Test, "test")] {
        for group in sorted_entries(&dir)? {
            if !group.is_dir() {
                continue;
            }
            let label = group
                .file_name()
                .and_then(|n| n.to_str())
                .ok_or_else(|| Error::format(group.display().to_string(), "non UTF-8 folder name"))?
                .to_owned();
            for file in sorted_entries(&group)? {
                if !file.is_file() {
                    continue;
                }
                let name = file.file_name().and_then(|n| n.to_str()).unwrap_or_default();
                let bytes = fs::read(&file)?;
                out.push(SourceRecord {
                    record: CorpusRecord {
                        id: format!("{tag}/{label}/{name}"),
                        text: latin1(&bytes),
                        labels: vec![label.clone()],
                    },
                    reference_split: Some(split),
                });
            }
        }
    }
    Ok(out)
}

/// Reads every `*tokens*.dat` file in `root` and attaches topics from the
/// first `*.qrels` file. Documents without topics keep an empty label set.
pub fn load_rcv1(root: &Path) -> Result<Vec<SourceRecord>> {
    let files = sorted_entries(root)?;
    let qrels = files
        .iter()
        .find(|p| p.extension().is_some_and(|e| e == "qrels"))
        .ok_or_else(|| Error::format(root.display().to_string(), "no .qrels topic file found"))?;
    let topics = read_rcv1_topics(qrels)?;

    let mut out = Vec::new();
    for file in files.iter().filter(|p| {
        p.extension().is_some_and(|e| e == "dat")
            && p.file_name().and_then(|n| n.to_str()).is_some_and(|n| n.contains("tokens"))
    }) {
        let reader = BufReader::new(fs::File::open(file)?);
        parse_rcv1_tokens(reader, &file.display().to_string(), |id, text| {
            let labels = topics.get(&id).cloned().unwrap_or_default();
            out.push(SourceRecord {
                record: CorpusRecord { id, text, labels },
                reference_split: None,
            });
        })?;
    }
    Ok(out)
}

fn read_rcv1_topics(path: &Path) -> Result<HashMap<String, Vec<String>>> {
    let mut topics: HashMap<String, Vec<String>> = HashMap::new();
    let reader = BufReader::new(fs::File::open(path)?);
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let mut parts = line.split_whitespace();
        match (parts.next(), parts.next()) {
            (Some(topic), Some(doc)) => topics.entry(doc.to_owned()).or_default().push(topic.to_owned()),
            (None, _) => continue,
            _ => {
                return Err(Error::format(
                    format!("{}:{}", path.display(), i + 1),
                    "expected `<topic> <doc id> 1`",
                ))
            }
        }
    }
    Ok(topics)
}

pub(crate) fn parse_rcv1_tokens<R: BufRead>(
    reader: R,
    source: &str,
    mut emit: impl FnMut(String, String),
) -> Result<()> {
    let mut current: Option<(String, String)> = None;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if let Some(rest) = line.strip_prefix(".I ") {
            if let Some((id, text)) = current.take() {
                emit(id, text);
            }
            current = Some((rest.trim().to_owned(), String::new()));
        } else if line.trim() == ".W" {
            if current.is_none() {
                return Err(Error::format(format!("{source}:{}", i + 1), ".W before .I"));
            }
        } else if let Some((_, text)) = current.as_mut() {
            if !line.trim().is_empty() {
                if !text.is_empty() {
                    text.push(' ');
                }
                text.push_str(line.trim());
            }
        } else if !line.trim().is_empty() {
            return Err(Error::format(format!("{source}:{}", i + 1), "text outside a document block"));
        }
    }
    if let Some((id, text)) = current {
        emit(id, text);
    }
    Ok(())
}

fn load_jsonl(path: &Path) -> Result<Vec<SourceRecord>> {
    let reader = BufReader::new(fs::File::open(path)?);
    Ok(read_jsonl(reader, &path.display().to_string())?
        .into_iter()
        .map(|record| SourceRecord {
            record,
            reference_split: None,
        })
        .collect())
}
