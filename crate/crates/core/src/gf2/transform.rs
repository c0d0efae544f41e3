use super::BitVector;
use crate::error::{Error, Result};

// Bits j with (j & h) == 0 inside a 64-bit word, for h = 1, 2, 4, ..., 32.
const LOW_HALF_MASKS: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0f0f_0f0f_0f0f_0f0f,
    0x00ff_00ff_00ff_00ff,
    0x0000_ffff_0000_ffff,
    0x0000_0000_ffff_ffff,
];

/// `c = u · F^{⊗m}` with `F = [[1, 0], [1, 1]]`, natural index order.
///
/// The transform is an involution over GF(2).
pub fn polar_transform(u: &BitVector) -> Result<BitVector> {
    let mut c = u.clone();
    polar_transform_in_place(&mut c)?;
    Ok(c)
}

pub fn polar_transform_in_place(v: &mut BitVector) -> Result<()> {
    let n = v.len();
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    let words = v.words_mut();
    // Stage with half-size h: c[j] ^= c[j + h] whenever bit h of j is clear.
    for (stage, mask) in LOW_HALF_MASKS.iter().enumerate() {
        let h = 1usize << stage;
        if h >= n {
            return Ok(());
        }
        for w in words.iter_mut() {
            *w ^= (*w >> h) & mask;
        }
    }
    let mut h_words = 1;
    while h_words < words.len() {
        for block in words.chunks_mut(2 * h_words) {
            let (lo, hi) = block.split_at_mut(h_words);
            for (a, b) in lo.iter_mut().zip(hi.iter()) {
                *a ^= b;
            }
        }
        h_words *= 2;
    }
    Ok(())
}
