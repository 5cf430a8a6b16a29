use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::params::{Matrix, ModelKind, ModelParams, ModelShape};
use crate::container::{self, Header, FLAG_DOC_EMBEDDINGS};
use crate::corpus::Vocabulary;
use crate::error::{Error, Result};

impl ModelParams {
    /// Serializes in the BPV1 layout: document embeddings (if kept),
    /// projection, word embeddings, softmax weights, softmax bias.
    pub fn write_to<W: Write>(&self, out: &mut W) -> Result<()> {
        let s = &self.shape;
        let header = Header {
            kind: s.kind.tag(),
            vocab_size: s.vocab_size as u32,
            dim: s.doc_dim as u32,
            code_bits: s.code_bits as u32,
            word_dim: s.word_dim as u32,
            context_window: s.context_window as u32,
            flags: if self.doc_embeddings.is_some() { FLAG_DOC_EMBEDDINGS } else { 0 },
            rows: self.doc_embeddings.as_ref().map_or(0, |m| m.rows() as u32),
        };
        header.write_to(out)?;
        container::write_block(out, &self.vocabulary.to_bytes())?;
        for m in [&self.doc_embeddings, &self.projection, &self.word_embeddings].into_iter().flatten() {
            container::write_f32s(out, m.as_slice())?;
        }
        container::write_f32s(out, self.softmax_weights.as_slice())?;
        container::write_f32s(out, &self.softmax_bias)?;
        Ok(())
    }

    pub fn read_from<R: Read>(input: &mut R) -> Result<Self> {
        let h = Header::read_from(input)?;
        let kind = ModelKind::from_tag(h.kind)
            .ok_or_else(|| Error::IncompatibleModel(format!("kind tag {} is not a paragraph vector model", h.kind)))?;
        let shape = ModelShape {
            kind,
            vocab_size: h.vocab_size as usize,
            doc_dim: h.dim as usize,
            code_bits: h.code_bits as usize,
            word_dim: h.word_dim as usize,
            context_window: h.context_window as usize,
        };
        shape
            .validate()
            .map_err(|e| Error::IncompatibleModel(format!("invalid header: {e}")))?;
        let vocab_bytes = container::read_block(input)?;
        let vocabulary = Vocabulary::read_from(vocab_bytes.as_slice())?;
        if vocabulary.len() != shape.vocab_size {
            return Err(Error::IncompatibleModel(format!(
                "header declares {} terms, vocabulary block has {}",
                shape.vocab_size,
                vocabulary.len()
            )));
        }
        let mut matrix = |rows: usize, cols: usize| -> Result<Matrix> {
            Matrix::from_vec(rows, cols, container::read_f32s(input, rows * cols)?)
        };
        let doc_embeddings = if h.flags & FLAG_DOC_EMBEDDINGS != 0 {
            Some(matrix(h.rows as usize, shape.doc_dim)?)
        } else {
            None
        };
        let projection = if kind == ModelKind::RealBinaryPvdbow {
            Some(matrix(shape.doc_dim, shape.code_bits)?)
        } else {
            None
        };
        let word_embeddings = if kind == ModelKind::BinaryPvdm {
            Some(matrix(shape.vocab_size, shape.word_dim)?)
        } else {
            None
        };
        let softmax_weights = matrix(shape.vocab_size, shape.softmax_width())?;
        let softmax_bias = container::read_f32s(input, shape.vocab_size)?;
        container::expect_end(input)?;
        Ok(ModelParams {
            shape,
            vocabulary,
            doc_embeddings,
            projection,
            word_embeddings,
            softmax_weights,
            softmax_bias,
        })
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        self.write_to(&mut out)?;
        Ok(out)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut out = BufWriter::new(File::create(path)?);
        self.write_to(&mut out)?;
        out.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut input = BufReader::new(File::open(path)?);
        Self::read_from(&mut input)
    }
}
