use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::model::BinaryCode;

/// Random hyperplane projection: `c` Gaussian hyperplanes through the
/// origin, one bit per hyperplane.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperplaneHasher {
    /// Row-major `c × d`.
    pub(crate) planes: Vec<f64>,
    pub(crate) dim: usize,
    pub(crate) bits: usize,
    pub(crate) seed: u64,
}

impl HyperplaneHasher {
    pub fn new(dim: usize, bits: usize, seed: u64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidConfig("hyperplanes need a positive input dimension".into()));
        }
        super::check_bits(bits)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let planes = (0..dim * bits).map(|_| StandardNormal.sample(&mut rng)).collect();
        Ok(HyperplaneHasher { planes, dim, bits, seed })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn plane(&self, i: usize) -> &[f64] {
        &self.planes[i * self.dim..(i + 1) * self.dim]
    }
}

/// Bit `i` is set iff the `i`-th hyperplane projection is `>= 0`.
pub fn rhp_hash(hasher: &HyperplaneHasher, vector: &[f64]) -> Result<BinaryCode> {
    super::check_input(vector, hasher.dim)?;
    let mut code = BinaryCode::zeros(hasher.bits)?;
    for i in 0..hasher.bits {
        let p: f64 = hasher.plane(i).iter().zip(vector).map(|(a, b)| a * b).sum();
        code.set(i, p >= 0.0);
    }
    Ok(code)
}
