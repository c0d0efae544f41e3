use crate::codebuild::NestedCodePair;
use crate::error::Result;
use crate::gf2::{polar_transform, BitVector};

use super::{channel_llrs, scl_decode_list, FrozenSchedule, OpCounters};

/// Result of quantizing a source word to the quantizer code.
#[derive(Clone, Debug, PartialEq)]
pub struct Quantization {
    pub x_q: BitVector,
    pub u: BitVector,
    /// Hamming distance between the source word and `x_q`.
    pub distortion: usize,
    pub list_rank: usize,
    pub ops: OpCounters,
}

/// Quantizes `x` with SCL on `schedule` at crossover `p1`, keeping the final
/// list path whose codeword is closest to `x` (lowest rank on ties).
pub fn quantize_with(x: &BitVector, schedule: &FrozenSchedule, p1: f64, list: usize) -> Result<Quantization> {
    let llrs = channel_llrs(x, p1)?;
    let out = scl_decode_list(&llrs, schedule, list)?;
    let mut best: Option<(usize, usize, BitVector, BitVector)> = None;
    for (rank, path) in out.paths.into_iter().enumerate() {
        let c = polar_transform(&path.u)?;
        let d = c.hamming_distance(x)?;
        if best.as_ref().is_none_or(|b| d < b.0) {
            best = Some((d, rank, c, path.u));
        }
    }
    let (distortion, list_rank, x_q, u) = best.expect("list is never empty");
    Ok(Quantization { x_q, u, distortion, list_rank, ops: out.ops })
}

/// Quantizes `x` to the quantizer code of `pair` (all `F1` bits zero).
pub fn quantize(x: &BitVector, pair: &NestedCodePair, p1: f64, list: usize) -> Result<Quantization> {
    quantize_with(x, &pair.quantizer_schedule(), p1, list)
}
