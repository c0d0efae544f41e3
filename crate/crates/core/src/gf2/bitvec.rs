use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};

const WORD_BITS: usize = 64;

/// Fixed-length vector over GF(2), packed into 64-bit words.
///
/// Bit `i` lives in word `i / 64` at position `i % 64` (LSB first). Bits past
/// `len` in the last word are always zero.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVector {
    words: Vec<u64>,
    len: usize,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self { words: vec![0; len.div_ceil(WORD_BITS)], len }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self { words: vec![u64::MAX; len.div_ceil(WORD_BITS)], len };
        v.clear_tail();
        v
    }

    /// Builds a vector from 0/1 values; any non-zero entry counts as one.
    pub fn from_bits(bits: &[u8]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b != 0 {
                v.words[i / WORD_BITS] |= 1 << (i % WORD_BITS);
            }
        }
        v
    }

    pub fn from_bools<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let bits: Vec<u8> = bits.into_iter().map(u8::from).collect();
        Self::from_bits(&bits)
    }

    /// Uniformly random vector.
    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut v = Self { words: (0..len.div_ceil(WORD_BITS)).map(|_| rng.gen()).collect(), len };
        v.clear_tail();
        v
    }

    /// I.i.d. Bernoulli(p) vector.
    pub fn bernoulli<R: Rng + ?Sized>(len: usize, p: f64, rng: &mut R) -> Self {
        let mut v = Self::zeros(len);
        if p <= 0.0 {
            return v;
        }
        for i in 0..len {
            if rng.gen::<f64>() < p {
                v.words[i / WORD_BITS] |= 1 << (i % WORD_BITS);
            }
        }
        v
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Reads bit `i`. Panics when `i >= len`, like slice indexing.
    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    pub fn checked_get(&self, i: usize) -> Result<bool> {
        if i >= self.len {
            return Err(Error::IndexOutOfRange { index: i, len: self.len });
        }
        Ok(self.get(i))
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    pub fn checked_set(&mut self, i: usize, value: bool) -> Result<()> {
        if i >= self.len {
            return Err(Error::IndexOutOfRange { index: i, len: self.len });
        }
        self.set(i, value);
        Ok(())
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        self.words[i / WORD_BITS] ^= 1 << (i % WORD_BITS);
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn xor_assign(&mut self, other: &BitVector) -> Result<()> {
        self.check_len(other)?;
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
        Ok(())
    }

    pub fn xor(&self, other: &BitVector) -> Result<BitVector> {
        let mut out = self.clone();
        out.xor_assign(other)?;
        Ok(out)
    }

    /// Parity of the bitwise AND with `other`, i.e. the GF(2) inner product.
    pub fn dot(&self, other: &BitVector) -> Result<bool> {
        self.check_len(other)?;
        Ok(self.dot_unchecked(other))
    }

    #[inline]
    pub(crate) fn dot_unchecked(&self, other: &BitVector) -> bool {
        let mut acc = 0u64;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= a & b;
        }
        acc.count_ones() & 1 == 1
    }

    /// Inner product restricted to positions `< end`.
    #[inline]
    pub(crate) fn dot_prefix(&self, other: &BitVector, end: usize) -> bool {
        let full = end / WORD_BITS;
        let mut acc = 0u64;
        for w in 0..full {
            acc ^= self.words[w] & other.words[w];
        }
        let rem = end % WORD_BITS;
        if rem != 0 {
            acc ^= self.words[full] & other.words[full] & ((1u64 << rem) - 1);
        }
        acc.count_ones() & 1 == 1
    }

    pub fn hamming_distance(&self, other: &BitVector) -> Result<usize> {
        self.check_len(other)?;
        Ok(self.words.iter().zip(&other.words).map(|(a, b)| (a ^ b).count_ones() as usize).sum())
    }

    /// Highest set index, if any.
    pub fn last_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .rev()
            .find(|(_, &w)| w != 0)
            .map(|(i, &w)| i * WORD_BITS + 63 - w.leading_zeros() as usize)
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn ones_iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.iter().enumerate().filter(|(_, b)| *b).map(|(i, _)| i)
    }

    pub fn to_bits(&self) -> Vec<u8> {
        self.iter().map(u8::from).collect()
    }

    /// Collects the bits at `indices` (in the given order) into a new vector.
    pub fn select(&self, indices: &[usize]) -> BitVector {
        BitVector::from_bools(indices.iter().map(|&i| self.get(i)))
    }

    /// Lowercase hex of the bytes, packed little-endian by logical index:
    /// byte `b` holds bits `8b..8b+8`, bit `8b + j` at position `j`.
    pub fn to_hex(&self) -> String {
        let nbytes = self.len.div_ceil(8);
        let mut s = String::with_capacity(2 * nbytes);
        for b in 0..nbytes {
            let byte = (self.words[b / 8] >> (8 * (b % 8))) & 0xff;
            s.push_str(&format!("{byte:02x}"));
        }
        s
    }

    /// Inverse of [`BitVector::to_hex`]; padding bits past `len` must be zero.
    pub fn from_hex(hex: &str, len: usize) -> Result<Self> {
        let nbytes = len.div_ceil(8);
        if hex.len() != 2 * nbytes {
            return Err(Error::InvalidParameter(format!(
                "hex string has {} digits, expected {} for {} bits",
                hex.len(),
                2 * nbytes,
                len
            )));
        }
        let mut v = Self::zeros(len);
        for b in 0..nbytes {
            let byte = u64::from_str_radix(&hex[2 * b..2 * b + 2], 16)
                .map_err(|e| Error::InvalidParameter(format!("bad hex digit: {e}")))?;
            v.words[b / 8] |= byte << (8 * (b % 8));
        }
        let tail = v.words.clone();
        v.clear_tail();
        if v.words != tail {
            return Err(Error::InvalidParameter("non-zero padding bits".into()));
        }
        Ok(v)
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD_BITS;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub(crate) fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    fn check_len(&self, other: &BitVector) -> Result<()> {
        if self.len != other.len {
            return Err(Error::LengthMismatch { left: self.len, right: other.len });
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector[")?;
        for b in self.iter() {
            write!(f, "{}", u8::from(b))?;
        }
        write!(f, "]")
    }
}

/// Matrix over GF(2) stored as packed rows of equal length.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct BinaryMatrix {
    rows: Vec<BitVector>,
    cols: usize,
}

impl BinaryMatrix {
    pub fn new(cols: usize) -> Self {
        Self { rows: Vec::new(), cols }
    }

    pub fn from_rows(cols: usize, rows: Vec<BitVector>) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::LengthMismatch { left: bad.len(), right: cols });
        }
        Ok(Self { rows, cols })
    }

    pub fn push_row(&mut self, row: BitVector) -> Result<()> {
        if row.len() != self.cols {
            return Err(Error::LengthMismatch { left: row.len(), right: self.cols });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn rows(&self) -> &[BitVector] {
        &self.rows
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_cols(&self) -> usize {
        self.cols
    }

    /// `M · u^T`: one syndrome bit per row.
    pub fn mul_vec(&self, u: &BitVector) -> Result<BitVector> {
        if u.len() != self.cols {
            return Err(Error::LengthMismatch { left: u.len(), right: self.cols });
        }
        Ok(BitVector::from_bools(self.rows.iter().map(|r| r.dot_unchecked(u))))
    }
}

/// Number of ones in the binary expansion of `i`.
#[inline]
pub fn index_weight(i: usize) -> u32 {
    i.count_ones()
}

/// GF(2) inner product of a constraint row with an input word.
pub fn row_inner_product(row: &BitVector, u: &BitVector) -> Result<bool> {
    row.dot(u)
}

pub fn hamming_distance(a: &BitVector, b: &BitVector) -> Result<usize> {
    a.hamming_distance(b)
}
