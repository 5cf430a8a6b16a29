use std::collections::HashMap;

use crate::corpus::RelevanceMode;
use crate::error::{Error, Result};

/// Denominator of the graded label-overlap relevance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OverlapDenominator {
    /// `|L_q ∩ L_d| / |L_q ∪ L_d|`
    #[default]
    Union,
    /// `|L_q ∩ L_d| / |L_q|`
    Query,
}

/// Relevance grades from document label sets.
#[derive(Debug, Clone)]
pub struct RelevanceJudge {
    mode: RelevanceMode,
    denominator: OverlapDenominator,
    labels: HashMap<String, Vec<u32>>,
}

fn intersection(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

impl RelevanceJudge {
    pub fn new<I, S>(mode: RelevanceMode, docs: I) -> Self
    where
        I: IntoIterator<Item = (S, Vec<String>)>,
        S: Into<String>,
    {
        let mut names: HashMap<String, u32> = HashMap::new();
        let labels = docs
            .into_iter()
            .map(|(id, ls)| {
                let mut interned: Vec<u32> = ls
                    .into_iter()
                    .map(|l| {
                        let next = names.len() as u32;
                        *names.entry(l).or_insert(next)
                    })
                    .collect();
                interned.sort_unstable();
                interned.dedup();
                (id.into(), interned)
            })
            .collect();
        RelevanceJudge {
            mode,
            denominator: OverlapDenominator::Union,
            labels,
        }
    }

    pub fn with_denominator(mut self, denominator: OverlapDenominator) -> Self {
        self.denominator = denominator;
        self
    }

    pub fn mode(&self) -> RelevanceMode {
        self.mode
    }

    pub(crate) fn labels(&self, id: &str) -> Result<&[u32]> {
        self.labels
            .get(id)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::MissingLabels(id.to_owned()))
    }

    pub(crate) fn grade(&self, q: &[u32], d: &[u32]) -> f64 {
        match self.mode {
            RelevanceMode::SameLabel => (!q.is_empty() && q == d) as u8 as f64,
            RelevanceMode::SharedAnyLabel => (intersection(q, d) > 0) as u8 as f64,
            RelevanceMode::LabelOverlap => {
                let common = intersection(q, d);
                if common == 0 {
                    return 0.0;
                }
                let denom = match self.denominator {
                    OverlapDenominator::Union => q.len() + d.len() - common,
                    OverlapDenominator::Query => q.len(),
                };
                common as f64 / denom as f64
            }
        }
    }

    pub fn relevance(&self, query: &str, doc: &str) -> Result<f64> {
        Ok(self.grade(self.labels(query)?, self.labels(doc)?))
    }
}
