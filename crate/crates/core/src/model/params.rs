use rand::Rng;
use rand_distr::{Distribution, Uniform};

use super::binarize::Activation;
use crate::corpus::Vocabulary;
use crate::error::{Error, Result};

/// Row-major `f32` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f32>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f32>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::shape(rows * cols, data.len()));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn uniform<R: Rng>(rows: usize, cols: usize, half_width: f64, rng: &mut R) -> Self {
        let data = if half_width > 0.0 {
            let dist = Uniform::new(-half_width, half_width).expect("finite positive range");
            (0..rows * cols).map(|_| dist.sample(rng) as f32).collect()
        } else {
            vec![0.0; rows * cols]
        };
        Matrix { rows, cols, data }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f32] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f32] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f32] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f32> {
        self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    BinaryPvdbow,
    BinaryPvdm,
    RealBinaryPvdbow,
    /// Real-valued PV-DBOW: the binary architecture with the coding layer
    /// replaced by identity. Feeds the hashing baselines.
    Pvdbow,
}

impl ModelKind {
    pub fn tag(self) -> u8 {
        match self {
            ModelKind::BinaryPvdbow => 0,
            ModelKind::BinaryPvdm => 1,
            ModelKind::RealBinaryPvdbow => 2,
            ModelKind::Pvdbow => 3,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            0 => Some(ModelKind::BinaryPvdbow),
            1 => Some(ModelKind::BinaryPvdm),
            2 => Some(ModelKind::RealBinaryPvdbow),
            3 => Some(ModelKind::Pvdbow),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::BinaryPvdbow => "binary-pvdbow",
            ModelKind::BinaryPvdm => "binary-pvdm",
            ModelKind::RealBinaryPvdbow => "real-binary",
            ModelKind::Pvdbow => "pvdbow",
        }
    }

    pub fn activation(self) -> Activation {
        match self {
            ModelKind::Pvdbow => Activation::Identity,
            _ => Activation::RoundedSigmoid,
        }
    }

    /// Whether the model produces a binary document code.
    pub fn has_code(self) -> bool {
        !matches!(self, ModelKind::Pvdbow)
    }

    /// Whether the document embedding itself is a useful real-valued
    /// representation.
    pub fn has_real_vector(self) -> bool {
        matches!(self, ModelKind::RealBinaryPvdbow | ModelKind::Pvdbow)
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "binary-pvdbow" => Ok(ModelKind::BinaryPvdbow),
            "binary-pvdm" => Ok(ModelKind::BinaryPvdm),
            "real-binary" | "real-binary-pvdbow" => Ok(ModelKind::RealBinaryPvdbow),
            "pvdbow" => Ok(ModelKind::Pvdbow),
            other => Err(Error::InvalidConfig(format!("unknown model kind {other:?}"))),
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Architecture hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelShape {
    pub kind: ModelKind,
    pub vocab_size: usize,
    /// Document embedding dimensionality.
    pub doc_dim: usize,
    /// Code length. Equals `doc_dim` except for Real-Binary PV-DBOW.
    pub code_bits: usize,
    /// Word embedding dimensionality (PV-DM only, 0 otherwise).
    pub word_dim: usize,
    /// One-sided context length (PV-DM only, 0 otherwise).
    pub context_window: usize,
}

impl ModelShape {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.vocab_size == 0 {
            return bad("vocabulary is empty".into());
        }
        if self.doc_dim == 0 || self.code_bits == 0 {
            return bad("dimensions must be positive".into());
        }
        if self.code_bits > super::code::MAX_CODE_BITS {
            return bad(format!("code length {} exceeds {}", self.code_bits, super::code::MAX_CODE_BITS));
        }
        match self.kind {
            ModelKind::BinaryPvdbow | ModelKind::Pvdbow | ModelKind::BinaryPvdm if self.doc_dim != self.code_bits => bad(
                format!(
                    "{} requires the embedding size ({}) to equal the code length ({})",
                    self.kind, self.doc_dim, self.code_bits
                ),
            ),
            ModelKind::BinaryPvdm if self.context_window == 0 || self.word_dim == 0 => {
                bad("binary-pvdm needs a positive context window and word dimension".into())
            }
            ModelKind::BinaryPvdbow | ModelKind::Pvdbow | ModelKind::RealBinaryPvdbow
                if self.context_window != 0 || self.word_dim != 0 =>
            {
                bad(format!("{} has no word context", self.kind))
            }
            _ => Ok(()),
        }
    }

    /// Width of the vector fed to the softmax.
    pub fn softmax_width(&self) -> usize {
        match self.kind {
            ModelKind::BinaryPvdm => self.code_bits + self.context_window * self.word_dim,
            _ => self.code_bits,
        }
    }

    /// Width of the embedding-layer input (document vector plus context).
    pub fn input_width(&self) -> usize {
        match self.kind {
            ModelKind::BinaryPvdm => self.doc_dim + self.context_window * self.word_dim,
            _ => self.doc_dim,
        }
    }

    /// Half width of the uniform range used for fresh document vectors.
    pub fn doc_init_range(&self) -> f64 {
        0.5 / self.doc_dim as f64
    }

    pub fn projection_init_range(&self) -> f64 {
        (6.0 / (self.doc_dim + self.code_bits) as f64).sqrt()
    }
}

/// All learned parameters of one model.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub shape: ModelShape,
    pub vocabulary: Vocabulary,
    /// One row per training document; absent in inference-only models.
    pub doc_embeddings: Option<Matrix>,
    /// `doc_dim × code_bits`, Real-Binary PV-DBOW only.
    pub projection: Option<Matrix>,
    /// `vocab_size × word_dim`, PV-DM only.
    pub word_embeddings: Option<Matrix>,
    /// `vocab_size × softmax_width`.
    pub softmax_weights: Matrix,
    pub softmax_bias: Vec<f32>,
}

impl ModelParams {
    /// Fresh parameters: embeddings uniform in `±0.5/dim`, projection
    /// uniform in `±sqrt(6/(d+c))`, softmax weights and bias zero.
    pub fn init<R: Rng>(shape: ModelShape, vocabulary: Vocabulary, n_docs: usize, rng: &mut R) -> Result<Self> {
        shape.validate()?;
        if vocabulary.len() != shape.vocab_size {
            return Err(Error::shape(shape.vocab_size, vocabulary.len()));
        }
        let doc_embeddings = Some(Matrix::uniform(n_docs, shape.doc_dim, shape.doc_init_range(), rng));
        let projection = (shape.kind == ModelKind::RealBinaryPvdbow).then(|| {
            Matrix::uniform(shape.doc_dim, shape.code_bits, shape.projection_init_range(), rng)
        });
        let word_embeddings = (shape.kind == ModelKind::BinaryPvdm)
            .then(|| Matrix::uniform(shape.vocab_size, shape.word_dim, 0.5 / shape.word_dim as f64, rng));
        Ok(ModelParams {
            shape,
            vocabulary,
            doc_embeddings,
            projection,
            word_embeddings,
            softmax_weights: Matrix::zeros(shape.vocab_size, shape.softmax_width()),
            softmax_bias: vec![0.0; shape.vocab_size],
        })
    }

    pub fn is_finite(&self) -> bool {
        self.doc_embeddings.as_ref().is_none_or(Matrix::is_finite)
            && self.projection.as_ref().is_none_or(Matrix::is_finite)
            && self.word_embeddings.as_ref().is_none_or(Matrix::is_finite)
            && self.softmax_weights.is_finite()
            && self.softmax_bias.iter().all(|x| x.is_finite())
    }

    /// Drops the per-document training embeddings.
    pub fn into_inference_only(mut self) -> Self {
        self.doc_embeddings = None;
        self
    }

    /// Order-sensitive checksum over the parameters that stay fixed during
    /// inference.
    pub fn frozen_checksum(&self) -> u64 {
        let mut h = Fnv::new();
        for m in [&self.projection, &self.word_embeddings].into_iter().flatten() {
            h.write_f32s(m.as_slice());
        }
        h.write_f32s(self.softmax_weights.as_slice());
        h.write_f32s(&self.softmax_bias);
        h.finish()
    }
}

struct Fnv(u64);

impl Fnv {
    fn new() -> Self {
        Fnv(0xcbf2_9ce4_8422_2325)
    }

    fn write_f32s(&mut self, xs: &[f32]) {
        for x in xs {
            for b in x.to_bits().to_le_bytes() {
                self.0 ^= b as u64;
                self.0 = self.0.wrapping_mul(0x0100_0000_01b3);
            }
        }
    }

    fn finish(&self) -> u64 {
        self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::TermCounts;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn vocab(n: usize) -> Vocabulary {
        let counts: TermCounts = (0..n).map(|i| (format!("w{i:03}"), 1u64)).collect();
        Vocabulary::build(&counts, 1, false).unwrap()
    }

    fn shape(kind: ModelKind, d: usize, c: usize, dw: usize, w: usize) -> ModelShape {
        ModelShape {
            kind,
            vocab_size: 10,
            doc_dim: d,
            code_bits: c,
            word_dim: dw,
            context_window: w,
        }
    }

    #[test]
    fn binary_pvdbow_requires_equal_dims() {
        assert!(shape(ModelKind::BinaryPvdbow, 8, 8, 0, 0).validate().is_ok());
        assert!(shape(ModelKind::BinaryPvdbow, 16, 8, 0, 0).validate().is_err());
        assert!(shape(ModelKind::RealBinaryPvdbow, 300, 28, 0, 0).validate().is_ok());
    }

    #[test]
    fn pvdm_widths() {
        let s = shape(ModelKind::BinaryPvdm, 4, 4, 4, 1);
        s.validate().unwrap();
        assert_eq!(s.softmax_width(), 8);
        assert_eq!(s.input_width(), 8);
        assert!(shape(ModelKind::BinaryPvdm, 4, 4, 4, 0).validate().is_err());
    }

    #[test]
    fn init_ranges_and_shapes() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = ModelShape {
            vocab_size: 10,
            ..shape(ModelKind::RealBinaryPvdbow, 30, 6, 0, 0)
        };
        let p = ModelParams::init(s, vocab(10), 5, &mut rng).unwrap();
        let docs = p.doc_embeddings.as_ref().unwrap();
        assert_eq!((docs.rows(), docs.cols()), (5, 30));
        assert!(docs.as_slice().iter().all(|&x| x.abs() <= (0.5 / 30.0) as f32));
        let proj = p.projection.as_ref().unwrap();
        assert_eq!((proj.rows(), proj.cols()), (30, 6));
        let r = (6.0f64 / 36.0).sqrt() as f32;
        assert!(proj.as_slice().iter().all(|&x| x.abs() <= r));
        assert!(p.softmax_weights.as_slice().iter().all(|&x| x == 0.0));
        assert!(p.word_embeddings.is_none());
        assert!(p.is_finite());
    }

    #[test]
    fn checksum_tracks_frozen_parameters_only() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = shape(ModelKind::BinaryPvdbow, 4, 4, 0, 0);
        let mut p = ModelParams::init(s, vocab(10), 3, &mut rng).unwrap();
        let before = p.frozen_checksum();
        p.doc_embeddings.as_mut().unwrap().row_mut(0)[0] = 9.0;
        assert_eq!(p.frozen_checksum(), before);
        p.softmax_bias[2] = 1.0;
        assert_ne!(p.frozen_checksum(), before);
    }

    #[test]
    fn kind_names_round_trip() {
        for k in [
            ModelKind::BinaryPvdbow,
            ModelKind::BinaryPvdm,
            ModelKind::RealBinaryPvdbow,
            ModelKind::Pvdbow,
        ] {
            assert_eq!(k.name().parse::<ModelKind>().unwrap(), k);
            assert_eq!(ModelKind::from_tag(k.tag()), Some(k));
        }
    }
}
