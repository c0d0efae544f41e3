use super::{ConstraintMatrix, ConstraintRow, PolarSubcode, RowKind};
use crate::decode::FrozenSchedule;
use crate::error::{Error, Result};
use crate::gf2::BitVector;

/// High-rate quantizer code `C1` (a polar code on `F1`) nested inside the
/// low-rate error-correcting subcode `C`, whose first `m1` rows are the unit
/// rows of `C1`.
#[derive(Clone, Debug, PartialEq)]
pub struct NestedCodePair {
    c1: PolarSubcode,
    c: PolarSubcode,
    m1: usize,
    key_indices: Vec<usize>,
    /// Measurement-channel crossover the pair was designed for.
    pub p_a: f64,
    /// Crossover of the quantizer design profile (`p̄₁`).
    pub quantizer_p: Option<f64>,
    /// Operating crossover of the reconstruction decoder (`p̄_c`).
    pub decoder_p: Option<f64>,
}

impl NestedCodePair {
    /// Assembles a pair from an already stacked constraint matrix whose first
    /// `m1` rows are static.
    pub fn from_stacked(c: PolarSubcode, m1: usize) -> Result<Self> {
        let n = c.n();
        let rows = c.matrix().rows();
        if m1 > rows.len() {
            return Err(Error::InvalidParameter(format!("m1 = {m1} exceeds {} rows", rows.len())));
        }
        if let Some(r) = rows[..m1].iter().find(|r| r.kind() != RowKind::Sfs) {
            return Err(Error::Construction(format!("quantizer row at pivot {} is not static", r.pivot())));
        }
        let f1: Vec<usize> = rows[..m1].iter().map(|r| r.pivot()).collect();
        let c1 = PolarSubcode::polar_code(n, &f1, c.design_p())?;
        let key_indices = c.info_set();
        Ok(Self { c1, c, m1, key_indices, p_a: 0.0, quantizer_p: None, decoder_p: None })
    }

    pub fn n(&self) -> usize {
        self.c.n()
    }

    /// Quantizer code `C1`.
    pub fn c1(&self) -> &PolarSubcode {
        &self.c1
    }

    /// Error-correcting code `C`.
    pub fn c(&self) -> &PolarSubcode {
        &self.c
    }

    pub fn m1(&self) -> usize {
        self.m1
    }

    /// Number of helper rows.
    pub fn m2(&self) -> usize {
        self.c.matrix().len() - self.m1
    }

    pub fn f1(&self) -> Vec<usize> {
        self.c1.frozen_set()
    }

    pub fn helper_rows(&self) -> &[ConstraintRow] {
        &self.c.matrix().rows()[self.m1..]
    }

    /// `K`: positions of `C`'s information bits, ascending.
    pub fn key_indices(&self) -> &[usize] {
        &self.key_indices
    }

    pub fn key_len(&self) -> usize {
        self.key_indices.len()
    }

    pub fn quantizer_schedule(&self) -> FrozenSchedule {
        self.c1.schedule()
    }

    /// Schedule of `C` with the quantizer rows frozen to zero and helper row
    /// `i` frozen to `helper[i]`.
    pub fn reconstruction_schedule(&self, helper: &BitVector) -> Result<FrozenSchedule> {
        if helper.len() != self.m2() {
            return Err(Error::LengthMismatch { left: helper.len(), right: self.m2() });
        }
        let mut offsets = BitVector::zeros(self.c.matrix().len());
        for i in 0..self.m2() {
            if helper.get(i) {
                offsets.set(self.m1 + i, true);
            }
        }
        FrozenSchedule::new(self.c.matrix(), &offsets)
    }

    pub fn with_operating_point(mut self, p_a: f64, quantizer_p: Option<f64>, decoder_p: Option<f64>) -> Self {
        self.p_a = p_a;
        self.quantizer_p = quantizer_p;
        self.decoder_p = decoder_p;
        self
    }
}

/// Stacks the unit rows on `f1` first, then the remaining static rows, then
/// type-B and type-A rows of `lowrate`. Requires `f1` to be a subset of the
/// static pivots of `lowrate`; rows of `f1` keep the order given.
pub fn stack_nested(f1: &[usize], lowrate: &PolarSubcode) -> Result<NestedCodePair> {
    let n = lowrate.n();
    let rows = lowrate.matrix().rows();
    let mut in_f1 = vec![false; n];
    for &j in f1 {
        if j >= n {
            return Err(Error::IndexOutOfRange { index: j, len: n });
        }
        if std::mem::replace(&mut in_f1[j], true) {
            return Err(Error::Construction(format!("index {j} repeated in F1")));
        }
        if !rows.iter().any(|r| r.pivot() == j && r.kind() == RowKind::Sfs) {
            return Err(Error::Construction(format!("F1 index {j} is not a static frozen index of the low-rate code")));
        }
    }
    let mut stacked: Vec<ConstraintRow> = f1.iter().map(|&j| ConstraintRow::unit(n, j)).collect();
    for kind in [RowKind::Sfs, RowKind::DfsB, RowKind::DfsA] {
        stacked.extend(rows.iter().filter(|r| r.kind() == kind && !in_f1[r.pivot()]).cloned());
    }
    let c = PolarSubcode::new(ConstraintMatrix::new(n, stacked)?, lowrate.design_p(), lowrate.seed())?;
    NestedCodePair::from_stacked(c, f1.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codebuild::{build_randomized_psc, default_ta_tb};
    use crate::gf2::polar_transform;
    use crate::reliability::{density_evolution_minsum, DEFAULT_PRUNE_EPS};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn psc(m: usize, k: usize, seed: u64) -> PolarSubcode {
        let n = 1 << m;
        let prof = density_evolution_minsum(0.2, m, DEFAULT_PRUNE_EPS).unwrap();
        let (a, b) = default_ta_tb(m, n, k);
        build_randomized_psc(n, k, &prof, a, b, seed).unwrap()
    }

    fn static_pivots(c: &PolarSubcode) -> Vec<usize> {
        c.matrix().rows().iter().filter(|r| r.kind() == RowKind::Sfs).map(|r| r.pivot()).collect()
    }

    #[test]
    fn all_static_rows_as_f1() {
        let c = psc(8, 64, 1);
        let pair = stack_nested(&static_pivots(&c), &c).unwrap();
        assert_eq!(pair.m2(), c.t_a() + c.t_b());
        assert!(pair.helper_rows().iter().all(|r| r.kind().is_dynamic()));
    }

    #[test]
    fn empty_f1() {
        let c = psc(8, 64, 1);
        let pair = stack_nested(&[], &c).unwrap();
        assert_eq!(pair.m1(), 0);
        assert_eq!(pair.m2(), 256 - 64);
        assert_eq!(pair.c1().k(), 256);
    }

    #[test]
    fn code1_bookkeeping() {
        let c = psc(10, 128, 2);
        // 553 helper rows: the 64 dynamic rows plus the 489 most reliable static rows.
        let statics = static_pivots(&c);
        let f1 = &statics[..statics.len() - (553 - 64)];
        let pair = stack_nested(f1, &c).unwrap();
        assert_eq!(pair.m1(), 343);
        assert_eq!(pair.m2(), 553);
        assert_eq!(pair.key_len(), 1024 - 343 - 553);
        assert_eq!(pair.key_len(), 128);
    }

    #[test]
    fn rejects_non_static_f1() {
        let c = psc(6, 16, 3);
        let dynamic = c.matrix().rows().iter().find(|r| r.kind().is_dynamic()).unwrap().pivot();
        assert!(stack_nested(&[dynamic], &c).is_err());
        let info = c.info_set()[0];
        assert!(stack_nested(&[info], &c).is_err());
    }

    #[test]
    fn nestedness_holds_for_sampled_codewords() {
        let c = psc(7, 24, 4);
        let statics = static_pivots(&c);
        let pair = stack_nested(&statics[..30], &c).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..300 {
            let (u, x) = pair.c().random_codeword(&mut rng);
            assert!(pair.c().contains_input(&u));
            assert!(pair.f1().iter().all(|&j| !u.get(j)));
            assert!(pair.c1().contains_input(&polar_transform(&x).unwrap()));
        }
    }
}
