#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const TOPICS: [&str; 4] = ["astro", "botany", "chess", "diving"];

fn word(prefix: &str, i: usize) -> String {
    let letters: String = format!("{i:03}").bytes().map(|b| (b'a' + (b - b'0')) as char).collect();
    format!("{prefix}{letters}")
}

/// JSONL documents drawn from four topic vocabularies plus shared filler
/// words; the label is the topic.
pub fn topic_corpus(n: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::new();
    for d in 0..n {
        let t = rng.random_range(0..TOPICS.len());
        let len = rng.random_range(20..50);
        let words: Vec<String> = (0..len)
            .map(|_| {
                if rng.random_bool(0.6) {
                    word(TOPICS[t], rng.random_range(0..25))
                } else {
                    word("filler", rng.random_range(0..40))
                }
            })
            .collect();
        out.push_str(&format!(
            "{{\"id\":\"doc{d:04}\",\"text\":\"{}\",\"labels\":[\"{}\"]}}\n",
            words.join(" "),
            TOPICS[t]
        ));
    }
    out
}

pub fn write_corpus(dir: &Path, n: usize, seed: u64) -> PathBuf {
    let p = dir.join("raw.jsonl");
    fs::write(&p, topic_corpus(n, seed)).unwrap();
    p
}

pub fn binpv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_binpv")).args(args).output().expect("binary runs")
}

pub fn ok(args: &[&str]) -> String {
    let out = binpv(args);
    assert!(
        out.status.success(),
        "binpv {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

pub fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Reads `key value` lines from an eval report.
pub fn report_value(report: &str, key: &str) -> f64 {
    report
        .lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix(' ')))
        .unwrap_or_else(|| panic!("{key} missing from report:\n{report}"))
        .parse()
        .unwrap()
}
