use std::rc::Rc;

use crate::error::{Error, Result};
use crate::gf2::{log2_len, polar_transform, BitVector};

use super::{DecodeOutcome, FrozenSchedule, OpCounters};

/// Channel LLRs of a BSC observation: `(1 − 2y_i)·ln((1 − p)/p)`.
pub fn channel_llrs(y: &BitVector, p: f64) -> Result<Vec<f64>> {
    if !(p > 0.0 && p < 0.5) {
        return Err(Error::ProbabilityDomain { value: p, domain: "(0, 0.5)" });
    }
    let l = ((1.0 - p) / p).ln();
    Ok(y.iter().map(|b| if b { -l } else { l }).collect())
}

#[inline]
pub(crate) fn f_minsum(a: f64, b: f64) -> f64 {
    let m = a.abs().min(b.abs());
    if (a < 0.0) != (b < 0.0) {
        -m
    } else {
        m
    }
}

#[inline]
pub(crate) fn hard(llr: f64) -> bool {
    llr < 0.0
}

/// One SC decoding path. Levels are reference counted so forked paths share
/// everything until one of them writes.
#[derive(Clone, Debug)]
pub(crate) struct ScState {
    m: usize,
    /// `llr[s]` has length `2^s`; `llr[m]` holds the channel LLRs.
    llr: Vec<Rc<Vec<f64>>>,
    /// `left[s]` holds the re-encoded bits of the last finished left subtree
    /// at level `s`.
    left: Vec<Rc<Vec<u8>>>,
    pub(crate) u: BitVector,
}

impl ScState {
    pub(crate) fn new(llrs: &[f64]) -> Result<Self> {
        let m = log2_len(llrs.len())?;
        let mut llr: Vec<Rc<Vec<f64>>> = (0..m).map(|s| Rc::new(vec![0.0; 1 << s])).collect();
        llr.push(Rc::new(llrs.to_vec()));
        let left = (0..m).map(|s| Rc::new(vec![0u8; 1 << s])).collect();
        Ok(Self { m, llr, left, u: BitVector::zeros(llrs.len()) })
    }

    /// LLR of `u_i` given the decisions committed so far. Phases must be
    /// visited in order.
    pub(crate) fn leaf_llr(&mut self, i: usize, ops: &mut OpCounters) -> f64 {
        let start = if i == 0 {
            self.m
        } else {
            let t = i.trailing_zeros() as usize;
            let half = 1usize << t;
            let (lo, hi) = self.llr.split_at_mut(t + 1);
            let dst = Rc::make_mut(&mut lo[t]);
            let src = &hi[0];
            let left = &self.left[t];
            for j in 0..half {
                let a = src[j];
                dst[j] = src[j + half] + if left[j] == 0 { a } else { -a };
            }
            ops.sums += half as u64;
            t
        };
        for s in (0..start).rev() {
            let half = 1usize << s;
            let (lo, hi) = self.llr.split_at_mut(s + 1);
            let dst = Rc::make_mut(&mut lo[s]);
            let src = &hi[0];
            for j in 0..half {
                dst[j] = f_minsum(src[j], src[j + half]);
            }
            ops.comps += half as u64;
        }
        self.llr[0][0]
    }

    /// Records `u_i = bit` and updates the partial sums.
    pub(crate) fn commit(&mut self, i: usize, bit: bool) {
        if bit {
            self.u.set(i, true);
        }
        let t = i.trailing_ones() as usize;
        if t >= self.m {
            return;
        }
        let size = 1usize << t;
        let (lo, hi) = self.left.split_at_mut(t);
        let dest = Rc::make_mut(&mut hi[0]);
        dest[size - 1] = bit as u8;
        for (s, left_s) in lo.iter().enumerate() {
            let half = 1usize << s;
            let base = size - 2 * half;
            for j in 0..half {
                dest[base + j] = left_s[j] ^ dest[base + half + j];
            }
        }
    }

    pub(crate) fn into_u(self) -> BitVector {
        self.u
    }
}

pub(crate) fn check_llrs(llrs: &[f64], schedule: &FrozenSchedule) -> Result<()> {
    if llrs.len() != schedule.n() {
        return Err(Error::LengthMismatch { left: llrs.len(), right: schedule.n() });
    }
    Ok(())
}

pub(crate) fn outcome(u: BitVector, ops: OpCounters, list_rank: usize, degraded: bool) -> DecodeOutcome {
    let x_hat = polar_transform(&u).expect("power-of-two length");
    DecodeOutcome { u_hat: u, x_hat, sum_count: ops.sums, comp_count: ops.comps, list_rank, degraded }
}

/// Successive-cancellation decoding with min-sum updates.
pub fn sc_decode(llrs: &[f64], schedule: &FrozenSchedule) -> Result<DecodeOutcome> {
    check_llrs(llrs, schedule)?;
    let mut state = ScState::new(llrs)?;
    let mut ops = OpCounters::default();
    for i in 0..schedule.n() {
        let l = state.leaf_llr(i, &mut ops);
        let bit = match schedule.frozen_value(i, &state.u) {
            Some(v) => v,
            None => {
                ops.comps += 1;
                hard(l)
            }
        };
        state.commit(i, bit);
    }
    Ok(outcome(state.into_u(), ops, 0, false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codebuild::{ConstraintMatrix, ConstraintRow, PolarSubcode};

    /// Textbook recursive SC on the natural-order transform, used as an oracle.
    fn recursive_sc(llr: &[f64], frozen: &[bool]) -> (Vec<u8>, Vec<u8>) {
        let n = llr.len();
        if n == 1 {
            let b = if frozen[0] { 0 } else { hard(llr[0]) as u8 };
            return (vec![b], vec![b]);
        }
        let h = n / 2;
        let la: Vec<f64> = (0..h).map(|j| f_minsum(llr[j], llr[j + h])).collect();
        let (ua, va) = recursive_sc(&la, &frozen[..h]);
        let lb: Vec<f64> = (0..h).map(|j| llr[j + h] + if va[j] == 0 { llr[j] } else { -llr[j] }).collect();
        let (ub, vb) = recursive_sc(&lb, &frozen[h..]);
        let mut v: Vec<u8> = (0..h).map(|j| va[j] ^ vb[j]).collect();
        v.extend(&vb);
        let mut u = ua;
        u.extend(ub);
        (u, v)
    }

    #[test]
    fn llr_formula() {
        let l = channel_llrs(&BitVector::from_bits(&[0, 1]), 0.25).unwrap();
        assert!((l[0] - 3f64.ln()).abs() < 1e-15 && (l[1] + 3f64.ln()).abs() < 1e-15);
        assert!(channel_llrs(&BitVector::zeros(2), 0.5).is_err());
        assert!(channel_llrs(&BitVector::zeros(2), 0.0).is_err());
    }

    #[test]
    fn matches_recursive_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for m in 0..=8 {
            let n = 1usize << m;
            for _ in 0..20 {
                let frozen: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
                let llr: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
                let pivots: Vec<usize> = (0..n).filter(|&j| frozen[j]).collect();
                let code = PolarSubcode::polar_code(n, &pivots, 0.1).unwrap();
                let out = sc_decode(&llr, &code.schedule()).unwrap();
                let (u, x) = recursive_sc(&llr, &frozen);
                assert_eq!(out.u_hat.to_bits(), u);
                assert_eq!(out.x_hat.to_bits(), x);
            }
        }
    }

    #[test]
    fn all_frozen_gives_zero() {
        let rows = (0..16).map(|j| ConstraintRow::unit(16, j)).collect();
        let sched = FrozenSchedule::zero_offsets(&ConstraintMatrix::new(16, rows).unwrap());
        let llr: Vec<f64> = (0..16).map(|j| if j % 3 == 0 { -2.0 } else { 1.0 }).collect();
        assert!(sc_decode(&llr, &sched).unwrap().u_hat.is_zero());
    }

    #[test]
    fn counters_for_plain_sc() {
        // n log n / 2 f-updates and as many g-updates, plus one hard decision per info bit.
        let code = PolarSubcode::polar_code(64, &[0, 1, 2, 3], 0.1).unwrap();
        let out = sc_decode(&[1.0; 64], &code.schedule()).unwrap();
        assert_eq!(out.sum_count, 32 * 6);
        assert_eq!(out.comp_count, 32 * 6 + 60);
    }
}
