use crate::codebuild::ConstraintMatrix;
use crate::error::{Error, Result};
use crate::gf2::BitVector;

/// What the decoder does at one input position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Slot {
    Info,
    /// `u[j] = offset ⊕ Σ_{s<j} coeffs[s]·u[s]`; `coeffs` is `None` for a
    /// static row and excludes the pivot otherwise.
    Frozen {
        coeffs: Option<BitVector>,
        offset: bool,
    },
}

/// Per-position decoding rule derived from a constraint matrix plus a
/// right-hand side (helper offsets).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrozenSchedule {
    slots: Vec<Slot>,
    info: Vec<usize>,
}

impl FrozenSchedule {
    /// `offsets[i]` is the right-hand side of row `i` of `matrix`.
    pub fn new(matrix: &ConstraintMatrix, offsets: &BitVector) -> Result<Self> {
        if offsets.len() != matrix.len() {
            return Err(Error::LengthMismatch { left: offsets.len(), right: matrix.len() });
        }
        let n = matrix.n();
        let mut slots = vec![Slot::Info; n];
        for (i, row) in matrix.rows().iter().enumerate() {
            let coeffs = if row.kind().is_dynamic() {
                let mut c = row.coeffs().clone();
                c.set(row.pivot(), false);
                (!c.is_zero()).then_some(c)
            } else {
                None
            };
            slots[row.pivot()] = Slot::Frozen { coeffs, offset: offsets.get(i) };
        }
        let info = (0..n).filter(|&i| slots[i] == Slot::Info).collect();
        Ok(Self { slots, info })
    }

    pub fn zero_offsets(matrix: &ConstraintMatrix) -> Self {
        Self::new(matrix, &BitVector::zeros(matrix.len())).expect("offset length matches")
    }

    pub fn n(&self) -> usize {
        self.slots.len()
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn info_positions(&self) -> &[usize] {
        &self.info
    }

    #[inline]
    pub fn is_frozen(&self, i: usize) -> bool {
        matches!(self.slots[i], Slot::Frozen { .. })
    }

    /// Value forced at frozen position `i` given the decided prefix of `u`.
    #[inline]
    pub fn frozen_value(&self, i: usize, u: &BitVector) -> Option<bool> {
        match &self.slots[i] {
            Slot::Info => None,
            Slot::Frozen { coeffs: None, offset } => Some(*offset),
            Slot::Frozen { coeffs: Some(c), offset } => Some(*offset ^ c.dot_prefix(u, i)),
        }
    }

    /// Fills information positions with `info` (in ascending position order)
    /// and frozen positions from their rules.
    pub fn encode(&self, info: &BitVector) -> Result<BitVector> {
        if info.len() != self.info.len() {
            return Err(Error::LengthMismatch { left: info.len(), right: self.info.len() });
        }
        let mut u = BitVector::zeros(self.n());
        let mut next = 0;
        for i in 0..self.n() {
            let bit = match self.frozen_value(i, &u) {
                Some(v) => v,
                None => {
                    next += 1;
                    info.get(next - 1)
                }
            };
            if bit {
                u.set(i, true);
            }
        }
        Ok(u)
    }

    /// Whether every frozen rule holds on `u`.
    pub fn satisfied_by(&self, u: &BitVector) -> bool {
        u.len() == self.n() && (0..self.n()).all(|i| self.frozen_value(i, u).is_none_or(|v| v == u.get(i)))
    }
}
