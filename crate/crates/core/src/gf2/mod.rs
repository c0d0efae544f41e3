//! Binary-field primitives: packed bit vectors, the polar transform, and the
//! scalar probability helpers shared by every other module.

mod bitvec;
mod entropy;
mod transform;

pub use bitvec::{hamming_distance, index_weight, row_inner_product, BinaryMatrix, BitVector};
pub use entropy::{binary_entropy, inverse_star, star};
pub use transform::{polar_transform, polar_transform_in_place};

use crate::error::{Error, Result};

/// `log2(n)` for a power-of-two length.
pub fn log2_len(n: usize) -> Result<usize> {
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    Ok(n.trailing_zeros() as usize)
}
