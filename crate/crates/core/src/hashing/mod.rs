//! Classical binarization baselines over real-valued document vectors.

mod itq;
mod rhp;

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use nalgebra::DMatrix;
use rayon::prelude::*;

pub use itq::{itq_fit, itq_hash, pca_top_c, ItqModel, ITQ_ITERATIONS};
pub use rhp::{rhp_hash, HyperplaneHasher};

use crate::container::{self, Header, FLAG_F64, KIND_ITQ, KIND_RHP};
use crate::error::{Error, Result};
use crate::model::{BinaryCode, MAX_CODE_BITS};

pub(crate) fn check_bits(bits: usize) -> Result<()> {
    if bits == 0 || bits > MAX_CODE_BITS {
        return Err(Error::WidthOverflow {
            width: bits,
            max: MAX_CODE_BITS,
        });
    }
    Ok(())
}

pub(crate) fn check_input(vector: &[f64], dim: usize) -> Result<()> {
    if vector.len() != dim {
        return Err(Error::shape(dim, vector.len()));
    }
    if vector.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    Ok(())
}

/// A fitted baseline hasher, as stored on disk.
#[derive(Debug, Clone, PartialEq)]
pub enum Baseline {
    Rhp(HyperplaneHasher),
    Itq(ItqModel),
}

impl Baseline {
    pub fn name(&self) -> &'static str {
        match self {
            Baseline::Rhp(_) => "rhp",
            Baseline::Itq(_) => "itq",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Baseline::Rhp(h) => h.dim(),
            Baseline::Itq(m) => m.dim(),
        }
    }

    pub fn bits(&self) -> usize {
        match self {
            Baseline::Rhp(h) => h.bits(),
            Baseline::Itq(m) => m.bits(),
        }
    }

    pub fn hash(&self, vector: &[f64]) -> Result<BinaryCode> {
        match self {
            Baseline::Rhp(h) => rhp_hash(h, vector),
            Baseline::Itq(m) => itq_hash(m, vector),
        }
    }

    pub fn hash_all(&self, vectors: &[Vec<f64>]) -> Result<Vec<BinaryCode>> {
        vectors.par_iter().map(|v| self.hash(v)).collect()
    }

    /// BPV1 layout with `f64` payload and an empty vocabulary block.
    /// RHP stores its seed as `rows` split over (`rows`, `word_dim`) and then
    /// the `c × d` planes; ITQ stores the iteration count in `rows`, then the
    /// mean, basis, rotation and loss history.
    pub fn write_to<W: Write>(&self, out: &mut W) -> Result<()> {
        let mut header = Header {
            kind: 0,
            vocab_size: 0,
            dim: self.dim() as u32,
            code_bits: self.bits() as u32,
            word_dim: 0,
            context_window: 0,
            flags: FLAG_F64,
            rows: 0,
        };
        match self {
            Baseline::Rhp(h) => {
                header.kind = KIND_RHP;
                header.rows = h.seed() as u32;
                header.word_dim = (h.seed() >> 32) as u32;
                header.write_to(out)?;
                container::write_block(out, &[])?;
                container::write_f64s(out, &h.planes)?;
            }
            Baseline::Itq(m) => {
                header.kind = KIND_ITQ;
                header.rows = m.iterations() as u32;
                header.write_to(out)?;
                container::write_block(out, &[])?;
                container::write_f64s(out, m.mean())?;
                container::write_f64s(out, &row_major(m.basis()))?;
                container::write_f64s(out, &row_major(m.rotation()))?;
                container::write_f64s(out, m.loss_history())?;
            }
        }
        Ok(())
    }

    pub fn read_from<R: Read>(input: &mut R) -> Result<Self> {
        let h = Header::read_from(input)?;
        if h.flags != FLAG_F64 {
            return Err(Error::IncompatibleModel(format!("unexpected flags {:#x} for a baseline", h.flags)));
        }
        if !container::read_block(input)?.is_empty() {
            return Err(Error::IncompatibleModel("baseline files carry no vocabulary".into()));
        }
        let (d, c) = (h.dim as usize, h.code_bits as usize);
        check_bits(c).map_err(|e| Error::IncompatibleModel(e.to_string()))?;
        let baseline = match h.kind {
            KIND_RHP => {
                let planes = container::read_f64s(input, c * d)?;
                Baseline::Rhp(HyperplaneHasher {
                    planes,
                    dim: d,
                    bits: c,
                    seed: (h.word_dim as u64) << 32 | h.rows as u64,
                })
            }
            KIND_ITQ => {
                let iterations = h.rows as usize;
                let mean = container::read_f64s(input, d)?;
                let basis = DMatrix::from_row_slice(d, c, &container::read_f64s(input, d * c)?);
                let rotation = DMatrix::from_row_slice(c, c, &container::read_f64s(input, c * c)?);
                let history = container::read_f64s(input, iterations + 1)?;
                Baseline::Itq(ItqModel::from_parts(mean, basis, rotation, iterations, history)?)
            }
            other => {
                return Err(Error::IncompatibleModel(format!("kind tag {other} is not a hashing baseline")));
            }
        };
        container::expect_end(input)?;
        Ok(baseline)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut out = BufWriter::new(File::create(path)?);
        self.write_to(&mut out)?;
        out.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read_from(&mut BufReader::new(File::open(path)?))
    }
}

fn row_major(m: &DMatrix<f64>) -> Vec<f64> {
    m.transpose().as_slice().to_vec()
}
