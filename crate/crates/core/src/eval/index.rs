use std::collections::HashMap;

use super::metrics::{cosine, hamming_words};
use crate::error::{Error, Result};
use crate::model::{words_for, BinaryCode};

/// Codes packed contiguously in insertion order, with optional aligned
/// real-valued vectors for re-ranking.
#[derive(Debug, Clone)]
pub struct CodeIndex {
    ids: Vec<String>,
    width: usize,
    stride: usize,
    words: Vec<u64>,
    vectors: Option<(usize, Vec<f32>)>,
    positions: HashMap<String, usize>,
    /// Positions sorted by ascending id.
    by_id: Vec<usize>,
}

impl CodeIndex {
    pub fn new(entries: Vec<(String, BinaryCode)>) -> Result<Self> {
        let width = entries.first().map_or(0, |(_, c)| c.width());
        if width == 0 {
            return Err(Error::InvalidConfig("cannot index an empty code set".into()));
        }
        let stride = words_for(width);
        let mut ids = Vec::with_capacity(entries.len());
        let mut words = Vec::with_capacity(entries.len() * stride);
        let mut positions = HashMap::with_capacity(entries.len());
        for (i, (id, code)) in entries.into_iter().enumerate() {
            if code.width() != width {
                return Err(Error::WidthMismatch(width, code.width()));
            }
            if positions.insert(id.clone(), i).is_some() {
                return Err(Error::format(format!("document {id:?}"), "duplicate id in code index"));
            }
            words.extend_from_slice(code.words());
            ids.push(id);
        }
        let mut by_id: Vec<usize> = (0..ids.len()).collect();
        by_id.sort_by(|&a, &b| ids[a].cmp(&ids[b]));
        Ok(CodeIndex {
            ids,
            width,
            stride,
            words,
            vectors: None,
            positions,
            by_id,
        })
    }

    /// Attaches real vectors aligned with insertion order.
    pub fn with_vectors(mut self, vectors: &[Vec<f32>]) -> Result<Self> {
        if vectors.len() != self.ids.len() {
            return Err(Error::shape(self.ids.len(), vectors.len()));
        }
        let dim = vectors.first().map_or(0, Vec::len);
        let mut flat = Vec::with_capacity(dim * vectors.len());
        for v in vectors {
            if v.len() != dim {
                return Err(Error::shape(dim, v.len()));
            }
            flat.extend_from_slice(v);
        }
        self.vectors = Some((dim, flat));
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn has_vectors(&self) -> bool {
        self.vectors.is_some()
    }

    pub fn position(&self, id: &str) -> Result<usize> {
        self.positions
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownQuery(id.to_owned()))
    }

    fn code_words(&self, pos: usize) -> &[u64] {
        &self.words[pos * self.stride..(pos + 1) * self.stride]
    }

    pub fn code(&self, pos: usize) -> BinaryCode {
        BinaryCode::from_words(self.code_words(pos).to_vec(), self.width).expect("stored codes are valid")
    }

    fn vector(&self, pos: usize) -> Option<&[f32]> {
        self.vectors.as_ref().map(|(d, v)| &v[pos * d..(pos + 1) * d])
    }

    /// Positions of all other documents by ascending Hamming distance to
    /// `query`, ties by ascending id.
    pub fn rank_by_code(&self, query: &str) -> Result<Vec<usize>> {
        let q = self.position(query)?;
        let qw = self.code_words(q);
        let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); self.width + 1];
        for &p in &self.by_id {
            if p != q {
                buckets[hamming_words(qw, self.code_words(p)) as usize].push(p);
            }
        }
        Ok(buckets.concat())
    }

    /// Positions of all other documents by descending cosine similarity of
    /// the real vectors, ties by ascending id.
    pub fn rank_by_cosine(&self, query: &str) -> Result<Vec<usize>> {
        let q = self.position(query)?;
        let candidates: Vec<usize> = self.by_id.iter().copied().filter(|&p| p != q).collect();
        self.rerank(q, candidates)
    }

    /// Documents within Hamming distance `radius` of the query code, ordered
    /// by descending cosine similarity, ties by ascending id.
    pub fn filter_then_rerank(&self, query: &str, radius: u32) -> Result<Vec<usize>> {
        let q = self.position(query)?;
        let qw = self.code_words(q);
        let candidates: Vec<usize> = self
            .by_id
            .iter()
            .copied()
            .filter(|&p| p != q && hamming_words(qw, self.code_words(p)) <= radius)
            .collect();
        self.rerank(q, candidates)
    }

    fn rerank(&self, q: usize, candidates: Vec<usize>) -> Result<Vec<usize>> {
        let qv = self
            .vector(q)
            .ok_or_else(|| Error::InvalidConfig("re-ranking needs real-valued vectors in the index".into()))?;
        let mut scored: Vec<(f64, usize)> = candidates
            .into_iter()
            .map(|p| (cosine(qv, self.vector(p).expect("vectors present")), p))
            .collect();
        // stable sort keeps the id order among equal scores
        scored.sort_by(|a, b| b.0.total_cmp(&a.0));
        Ok(scored.into_iter().map(|(_, p)| p).collect())
    }
}
