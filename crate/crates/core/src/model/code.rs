use crate::error::{Error, Result};

/// Largest supported code width in bits.
pub const MAX_CODE_BITS: usize = 4096;

/// A fixed-width bit vector packed into 64-bit words. Bit `i` of the code
/// lives in bit `i % 64` of word `i / 64`; bits past `width` are zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryCode {
    words: Vec<u64>,
    width: usize,
}

pub(crate) fn words_for(width: usize) -> usize {
    width.div_ceil(64)
}

impl BinaryCode {
    pub fn zeros(width: usize) -> Result<Self> {
        check_width(width)?;
        Ok(BinaryCode {
            words: vec![0; words_for(width)],
            width,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn bit(&self, i: usize) -> bool {
        assert!(i < self.width, "bit {i} out of range for width {}", self.width);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.width, "bit {i} out of range for width {}", self.width);
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    /// Builds a code from raw words, clearing any padding bits.
    pub fn from_words(mut words: Vec<u64>, width: usize) -> Result<Self> {
        check_width(width)?;
        if words.len() != words_for(width) {
            return Err(Error::shape(words_for(width), words.len()));
        }
        clear_padding(&mut words, width);
        Ok(BinaryCode { words, width })
    }

    /// `ceil(width / 8)` bytes, little-endian bit order.
    pub fn to_bytes(&self) -> Vec<u8> {
        let n = self.width.div_ceil(8);
        self.words
            .iter()
            .flat_map(|w| w.to_le_bytes())
            .take(n)
            .collect()
    }

    pub fn from_bytes(bytes: &[u8], width: usize) -> Result<Self> {
        check_width(width)?;
        if bytes.len() != width.div_ceil(8) {
            return Err(Error::shape(width.div_ceil(8), bytes.len()));
        }
        let mut words = vec![0u64; words_for(width)];
        for (i, &b) in bytes.iter().enumerate() {
            words[i / 8] |= (b as u64) << (8 * (i % 8));
        }
        if padding_set(&words, width) {
            return Err(Error::format("code bytes", "bits set beyond the code width"));
        }
        Ok(BinaryCode { words, width })
    }

    pub fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }
}

fn check_width(width: usize) -> Result<()> {
    if width == 0 || width > MAX_CODE_BITS {
        return Err(Error::WidthOverflow {
            width,
            max: MAX_CODE_BITS,
        });
    }
    Ok(())
}

fn clear_padding(words: &mut [u64], width: usize) {
    let rem = width % 64;
    if rem != 0 {
        if let Some(last) = words.last_mut() {
            *last &= (1u64 << rem) - 1;
        }
    }
}

fn padding_set(words: &[u64], width: usize) -> bool {
    let rem = width % 64;
    rem != 0 && words.last().is_some_and(|&w| w >> rem != 0)
}

/// Packs a {0,1} vector; any nonzero entry counts as a one.
pub fn pack_bits(bits: &[u8]) -> Result<BinaryCode> {
    let mut code = BinaryCode::zeros(bits.len())?;
    for (i, &b) in bits.iter().enumerate() {
        if b != 0 {
            code.words[i / 64] |= 1u64 << (i % 64);
        }
    }
    Ok(code)
}

pub fn unpack_bits(code: &BinaryCode) -> Vec<u8> {
    (0..code.width).map(|i| code.bit(i) as u8).collect()
}
