//! Successive-cancellation family decoders for polar subcodes.
//!
//! All decoders use min-sum updates and nonnegative path penalties (smaller
//! is better). Counters follow one contract: every g-update addition and every
//! metric penalty addition is a summation; every f-update minimum, every hard
//! decision, and every sort or queue comparison is a comparison.

mod list;
mod quantize;
mod sc;
mod schedule;
mod sequential;

pub use list::{scl_decode, scl_decode_list, ListDecode, ListPath};
pub use quantize::{quantize, quantize_with, Quantization};
pub use sc::{channel_llrs, sc_decode};
pub use schedule::{FrozenSchedule, Slot};
pub use sequential::{sequential_bias, sequential_decode};

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::gf2::{log2_len, BitVector};

/// Default priority-queue capacity of the sequential decoder.
pub const DEFAULT_QUEUE: usize = 1024;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OpCounters {
    pub sums: u64,
    pub comps: u64,
}

impl std::ops::AddAssign for OpCounters {
    fn add_assign(&mut self, rhs: Self) {
        self.sums += rhs.sums;
        self.comps += rhs.comps;
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeOutcome {
    pub u_hat: BitVector,
    pub x_hat: BitVector,
    pub sum_count: u64,
    pub comp_count: u64,
    pub list_rank: usize,
    /// Set when the sequential decoder ran out of queue entries and finished
    /// greedily.
    pub degraded: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecoderKind {
    Scl { list: usize },
    Sequential { list: usize, queue: usize },
}

impl DecoderKind {
    pub fn list(self) -> usize {
        match self {
            DecoderKind::Scl { list } | DecoderKind::Sequential { list, .. } => list,
        }
    }

    pub fn with_list(self, list: usize) -> Self {
        match self {
            DecoderKind::Scl { .. } => DecoderKind::Scl { list },
            DecoderKind::Sequential { queue, .. } => DecoderKind::Sequential { list, queue },
        }
    }
}

impl fmt::Display for DecoderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DecoderKind::Scl { .. } => "scl",
            DecoderKind::Sequential { .. } => "seq",
        })
    }
}

impl FromStr for DecoderKind {
    type Err = Error;

    /// Parses `scl` or `seq` with list size 1 and the default queue.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "scl" => Ok(DecoderKind::Scl { list: 1 }),
            "seq" => Ok(DecoderKind::Sequential { list: 1, queue: DEFAULT_QUEUE }),
            other => Err(Error::InvalidParameter(format!("unknown decoder {other:?}"))),
        }
    }
}

/// A decoder bound to a code length and operating crossover. The sequential
/// variant precomputes its score bias at that crossover.
#[derive(Clone, Debug, PartialEq)]
pub struct Decoder {
    kind: DecoderKind,
    bias: Option<Vec<f64>>,
}

impl Decoder {
    pub fn new(kind: DecoderKind, n: usize, p: f64) -> Result<Self> {
        let m = log2_len(n)?;
        let bias = match kind {
            DecoderKind::Scl { list } if list >= 1 => None,
            DecoderKind::Sequential { list, queue } if list >= 1 && queue >= 1 => Some(sequential_bias(p, m)?),
            _ => return Err(Error::InvalidParameter("list and queue sizes must be at least 1".into())),
        };
        Ok(Self { kind, bias })
    }

    pub fn kind(&self) -> DecoderKind {
        self.kind
    }

    pub fn decode(&self, llrs: &[f64], schedule: &FrozenSchedule) -> Result<DecodeOutcome> {
        match (self.kind, &self.bias) {
            (DecoderKind::Scl { list }, _) => scl_decode(llrs, schedule, list),
            (DecoderKind::Sequential { list, queue }, Some(bias)) => {
                sequential_decode(llrs, schedule, bias, list, queue)
            }
            (DecoderKind::Sequential { .. }, None) => unreachable!("bias built in new"),
        }
    }
}
