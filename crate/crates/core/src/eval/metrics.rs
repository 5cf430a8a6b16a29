use crate::error::{Error, Result};
use crate::model::BinaryCode;

/// Number of differing bits.
#[inline]
pub fn hamming(a: &BinaryCode, b: &BinaryCode) -> Result<u32> {
    if a.width() != b.width() {
        return Err(Error::WidthMismatch(a.width(), b.width()));
    }
    Ok(hamming_words(a.words(), b.words()))
}

#[inline]
pub(crate) fn hamming_words(a: &[u64], b: &[u64]) -> u32 {
    a.iter().zip(b).map(|(x, y)| (x ^ y).count_ones()).sum()
}

/// Cosine similarity; 0 when either vector is all zeros.
pub fn cosine(u: &[f32], v: &[f32]) -> f64 {
    let (mut dot, mut uu, mut vv) = (0.0f64, 0.0f64, 0.0f64);
    for (&a, &b) in u.iter().zip(v) {
        let (a, b) = (a as f64, b as f64);
        dot += a * b;
        uu += a * a;
        vv += b * b;
    }
    if uu == 0.0 || vv == 0.0 {
        return 0.0;
    }
    (dot / (uu.sqrt() * vv.sqrt())).clamp(-1.0, 1.0)
}

/// Average precision of a ranked list with `total_relevant` relevant
/// documents in the collection. A grade above zero counts as relevant.
pub fn average_precision_with_total(grades: &[f64], total_relevant: usize) -> f64 {
    if total_relevant == 0 {
        return 0.0;
    }
    let mut hits = 0usize;
    let mut sum = 0.0;
    for (i, &g) in grades.iter().enumerate() {
        if g > 0.0 {
            hits += 1;
            sum += hits as f64 / (i + 1) as f64;
        }
    }
    sum / total_relevant as f64
}

/// Average precision over the relevant documents in `grades`.
pub fn average_precision(grades: &[f64]) -> f64 {
    average_precision_with_total(grades, grades.iter().filter(|&&g| g > 0.0).count())
}

fn dcg(grades: impl Iterator<Item = f64>, k: usize) -> f64 {
    grades
        .take(k)
        .enumerate()
        .map(|(i, g)| g / ((i + 2) as f64).log2())
        .sum()
}

/// DCG@k of `ranked` over the ideal DCG@k of `pool`, the query's grades
/// over the whole candidate collection.
pub fn ndcg_at_k(ranked: &[f64], pool: &[f64], k: usize) -> f64 {
    let mut ideal: Vec<f64> = pool.iter().copied().filter(|&g| g > 0.0).collect();
    ideal.sort_by(|a, b| b.total_cmp(a));
    let best = dcg(ideal.into_iter(), k);
    if best == 0.0 {
        return 0.0;
    }
    dcg(ranked.iter().copied(), k) / best
}

pub const RECALL_LEVELS: usize = 11;

/// Interpolated precision at recall 0.0, 0.1, ..., 1.0; `None` when the
/// query has no relevant documents.
pub fn interpolated_precision(grades: &[f64], total_relevant: usize) -> Option<[f64; RECALL_LEVELS]> {
    if total_relevant == 0 {
        return None;
    }
    // (recall, precision) after each relevant hit
    let mut points = Vec::new();
    let mut hits = 0usize;
    for (i, &g) in grades.iter().enumerate() {
        if g > 0.0 {
            hits += 1;
            points.push((hits as f64 / total_relevant as f64, hits as f64 / (i + 1) as f64));
        }
    }
    let mut out = [0.0; RECALL_LEVELS];
    let mut best = 0.0f64;
    let mut j = points.len();
    for level in (0..RECALL_LEVELS).rev() {
        let r = level as f64 / 10.0;
        while j > 0 && points[j - 1].0 >= r - 1e-12 {
            best = best.max(points[j - 1].1);
            j -= 1;
        }
        out[level] = best;
    }
    Some(out)
}

/// Mean interpolated precision curve over queries given as
/// (ranked grades, total relevant). Returns the curve and the number of
/// queries skipped for having no relevant documents.
pub fn pr_curve(queries: &[(Vec<f64>, usize)]) -> (Vec<(f64, f64)>, usize) {
    let mut sum = [0.0; RECALL_LEVELS];
    let mut used = 0usize;
    for (grades, total) in queries {
        if let Some(p) = interpolated_precision(grades, *total) {
            for (s, x) in sum.iter_mut().zip(p) {
                *s += x;
            }
            used += 1;
        }
    }
    let curve = (0..RECALL_LEVELS)
        .map(|l| (l as f64 / 10.0, if used == 0 { 0.0 } else { sum[l] / used as f64 }))
        .collect();
    (curve, queries.len() - used)
}
