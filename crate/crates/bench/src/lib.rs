//! Shared fixtures for the criterion benches.

use binpv::corpus::{TermCounts, Vocabulary};
use binpv::model::{BinaryCode, Matrix, ModelParams, ModelShape};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_code<R: Rng>(bits: usize, rng: &mut R) -> BinaryCode {
    let mut code = BinaryCode::zeros(bits).unwrap();
    for i in 0..bits {
        code.set(i, rng.random_bool(0.5));
    }
    code
}

pub fn random_codes(n: usize, bits: usize, seed: u64) -> Vec<(String, BinaryCode)> {
    let mut rng = rng(seed);
    (0..n).map(|i| (format!("d{i}"), random_code(bits, &mut rng))).collect()
}

/// A vocabulary of `size` terms with Zipf-like counts.
pub fn vocabulary(size: usize) -> Vocabulary {
    let mut counts = TermCounts::new();
    for i in 0..size {
        let term = format!("t{i}");
        let reps = (size / (i + 1)).max(1);
        counts.add_document(&vec![term.as_str(); reps]);
    }
    Vocabulary::build(&counts, 1, false).unwrap()
}

/// Parameters with random softmax weights, so the forward pass does real work.
pub fn params(shape: ModelShape, seed: u64) -> ModelParams {
    let mut rng = rng(seed);
    let mut p = ModelParams::init(shape, vocabulary(shape.vocab_size), 1, &mut rng).unwrap();
    p.softmax_weights = Matrix::uniform(shape.vocab_size, shape.softmax_width(), 0.1, &mut rng);
    p
}

pub fn gaussian_like(n: usize, dim: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = rng(seed);
    (0..n)
        .map(|_| (0..dim).map(|j| rng.random_range(-1.0..1.0) * (1.0 + j as f64 / dim as f64)).collect())
        .collect()
}
