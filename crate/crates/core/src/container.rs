//! The "BPV1" binary container shared by trained models and fitted hashing
//! baselines.
//!
//! Layout (little-endian): magic `BPV1`, kind tag `u8`, vocabulary size
//! `u32`, embedding dim `u32`, code bits `u32`, word dim `u32`, context
//! window `u32`, flags `u8`, row count `u32`, vocabulary block length `u64`
//! followed by the vocabulary file bytes, then the matrices as row-major
//! `f32` in a kind-specific order.

use std::io::{Read, Write};

use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"BPV1";

/// Set when per-document training embeddings are stored.
pub const FLAG_DOC_EMBEDDINGS: u8 = 0b1;

/// Set when the matrices are stored as `f64` instead of `f32`.
pub const FLAG_F64: u8 = 0b10;

/// Kind tags of the fitted hashing baselines.
pub const KIND_RHP: u8 = 4;
pub const KIND_ITQ: u8 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Header {
    pub kind: u8,
    pub vocab_size: u32,
    pub dim: u32,
    pub code_bits: u32,
    pub word_dim: u32,
    pub context_window: u32,
    pub flags: u8,
    pub rows: u32,
}

impl Header {
    pub fn write_to<W: Write>(&self, out: &mut W) -> Result<()> {
        out.write_all(MAGIC)?;
        out.write_all(&[self.kind])?;
        for v in [self.vocab_size, self.dim, self.code_bits, self.word_dim, self.context_window] {
            out.write_all(&v.to_le_bytes())?;
        }
        out.write_all(&[self.flags])?;
        out.write_all(&self.rows.to_le_bytes())?;
        Ok(())
    }

    pub fn read_from<R: Read>(input: &mut R) -> Result<Self> {
        let mut magic = [0u8; 4];
        input
            .read_exact(&mut magic)
            .map_err(|_| Error::IncompatibleModel("file too short for a BPV1 header".into()))?;
        if &magic != MAGIC {
            return Err(Error::IncompatibleModel(format!("bad magic {magic:?}")));
        }
        let kind = read_u8(input)?;
        let vocab_size = read_u32(input)?;
        let dim = read_u32(input)?;
        let code_bits = read_u32(input)?;
        let word_dim = read_u32(input)?;
        let context_window = read_u32(input)?;
        let flags = read_u8(input)?;
        let rows = read_u32(input)?;
        Ok(Header {
            kind,
            vocab_size,
            dim,
            code_bits,
            word_dim,
            context_window,
            flags,
            rows,
        })
    }
}

fn truncated(e: std::io::Error) -> Error {
    if e.kind() == std::io::ErrorKind::UnexpectedEof {
        Error::IncompatibleModel("truncated model file".into())
    } else {
        Error::Io(e)
    }
}

pub fn read_u8<R: Read>(input: &mut R) -> Result<u8> {
    let mut b = [0u8; 1];
    input.read_exact(&mut b).map_err(truncated)?;
    Ok(b[0])
}

pub fn read_u32<R: Read>(input: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    input.read_exact(&mut b).map_err(truncated)?;
    Ok(u32::from_le_bytes(b))
}

pub fn read_u64<R: Read>(input: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    input.read_exact(&mut b).map_err(truncated)?;
    Ok(u64::from_le_bytes(b))
}

pub fn write_block<W: Write>(out: &mut W, bytes: &[u8]) -> Result<()> {
    out.write_all(&(bytes.len() as u64).to_le_bytes())?;
    out.write_all(bytes)?;
    Ok(())
}

pub fn read_block<R: Read>(input: &mut R) -> Result<Vec<u8>> {
    let len = read_u64(input)?;
    let mut buf = Vec::new();
    input.take(len).read_to_end(&mut buf)?;
    if buf.len() as u64 != len {
        return Err(Error::IncompatibleModel("truncated vocabulary block".into()));
    }
    Ok(buf)
}

pub fn write_f32s<W: Write>(out: &mut W, xs: &[f32]) -> Result<()> {
    let mut buf = Vec::with_capacity(xs.len() * 4);
    for x in xs {
        buf.extend_from_slice(&x.to_le_bytes());
    }
    out.write_all(&buf)?;
    Ok(())
}

pub fn read_f32s<R: Read>(input: &mut R, n: usize) -> Result<Vec<f32>> {
    let mut buf = vec![0u8; n * 4];
    input.read_exact(&mut buf).map_err(truncated)?;
    Ok(buf
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect())
}

pub fn write_f64s<W: Write>(out: &mut W, xs: &[f64]) -> Result<()> {
    let mut buf = Vec::with_capacity(xs.len() * 8);
    for x in xs {
        buf.extend_from_slice(&x.to_le_bytes());
    }
    out.write_all(&buf)?;
    Ok(())
}

pub fn read_f64s<R: Read>(input: &mut R, n: usize) -> Result<Vec<f64>> {
    let mut buf = vec![0u8; n * 8];
    input.read_exact(&mut buf).map_err(truncated)?;
    Ok(buf
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect())
}

/// Fails unless the reader is exhausted.
pub fn expect_end<R: Read>(input: &mut R) -> Result<()> {
    let mut probe = [0u8; 1];
    match input.read(&mut probe)? {
        0 => Ok(()),
        _ => Err(Error::IncompatibleModel("trailing bytes after model data".into())),
    }
}
