use rand::Rng;

use super::{ConstraintMatrix, ConstraintRow, RowKind};
use crate::decode::FrozenSchedule;
use crate::error::{Error, Result};
use crate::gf2::{index_weight, log2_len, polar_transform, BitVector};
use crate::reliability::ReliabilityProfile;
use crate::sim::stream_rng;

/// `(n = 2^m, k)` polar subcode: polar-transform inputs constrained by a
/// constraint matrix with `n − k` rows.
#[derive(Clone, Debug, PartialEq)]
pub struct PolarSubcode {
    n: usize,
    k: usize,
    matrix: ConstraintMatrix,
    design_p: f64,
    seed: u64,
}

impl PolarSubcode {
    pub fn new(matrix: ConstraintMatrix, design_p: f64, seed: u64) -> Result<Self> {
        let n = matrix.n();
        log2_len(n)?;
        matrix.validate()?;
        Ok(Self { n, k: n - matrix.len(), matrix, design_p, seed })
    }

    /// Plain polar code with unit rows on `frozen` (in the given order).
    pub fn polar_code(n: usize, frozen: &[usize], design_p: f64) -> Result<Self> {
        let rows = frozen.iter().map(|&j| {
            if j >= n {
                Err(Error::IndexOutOfRange { index: j, len: n })
            } else {
                Ok(ConstraintRow::unit(n, j))
            }
        });
        let matrix = ConstraintMatrix::new(n, rows.collect::<Result<_>>()?)?;
        Self::new(matrix, design_p, 0)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn matrix(&self) -> &ConstraintMatrix {
        &self.matrix
    }

    pub fn design_p(&self) -> f64 {
        self.design_p
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn t_a(&self) -> usize {
        self.matrix.count_kind(RowKind::DfsA)
    }

    pub fn t_b(&self) -> usize {
        self.matrix.count_kind(RowKind::DfsB)
    }

    /// Pivots in row order.
    pub fn frozen_set(&self) -> Vec<usize> {
        self.matrix.pivots()
    }

    /// Non-pivot positions, ascending.
    pub fn info_set(&self) -> Vec<usize> {
        let mut frozen = vec![false; self.n];
        for j in self.matrix.pivots() {
            frozen[j] = true;
        }
        (0..self.n).filter(|&i| !frozen[i]).collect()
    }

    pub fn schedule(&self) -> FrozenSchedule {
        FrozenSchedule::zero_offsets(&self.matrix)
    }

    /// Input word with uniformly random information bits and all
    /// constraints applied in pivot order.
    pub fn random_input<R: Rng + ?Sized>(&self, rng: &mut R) -> BitVector {
        self.schedule().encode(&BitVector::random(self.k, rng)).expect("k information bits")
    }

    /// Random `(u, c)` pair with `c = u · F^{⊗m}` a codeword.
    pub fn random_codeword<R: Rng + ?Sized>(&self, rng: &mut R) -> (BitVector, BitVector) {
        let u = self.random_input(rng);
        let c = polar_transform(&u).expect("power-of-two length");
        (u, c)
    }

    /// Whether `u` satisfies every row with zero right-hand side.
    pub fn contains_input(&self, u: &BitVector) -> bool {
        self.matrix.rows().iter().all(|r| !r.coeffs().dot_unchecked(u))
    }
}

/// Counts of type-A and type-B rows suggested for list size 32:
/// `t_A = min(m, n − k)`, `t_B = max(0, min(64 − t_A, n − k − t_A))`.
pub fn default_ta_tb(m: usize, n: usize, k: usize) -> (usize, usize) {
    let redundancy = n.saturating_sub(k);
    let t_a = m.min(redundancy);
    let t_b = 64usize.saturating_sub(t_a).min(redundancy - t_a);
    (t_a, t_b)
}

/// Randomized polar subcode.
///
/// Static rows take the `n − k − t_A − t_B` least reliable positions of
/// `profile`, type-B rows the next `t_B`. Type-A pivots are the remaining
/// positions of smallest binary weight, largest index first. Dynamic rows get
/// uniform random coefficients below the pivot, drawn from a stream keyed by
/// `(seed, row index)`.
pub fn build_randomized_psc(
    n: usize,
    k: usize,
    profile: &ReliabilityProfile,
    t_a: usize,
    t_b: usize,
    seed: u64,
) -> Result<PolarSubcode> {
    log2_len(n)?;
    if profile.n() != n {
        return Err(Error::LengthMismatch { left: profile.n(), right: n });
    }
    if k > n {
        return Err(Error::InvalidParameter(format!("k = {k} exceeds n = {n}")));
    }
    let redundancy = n - k;
    if t_a + t_b > redundancy {
        return Err(Error::InvalidParameter(format!("t_A + t_B = {} exceeds n − k = {redundancy}", t_a + t_b)));
    }
    let n_static = redundancy - t_a - t_b;
    let order = profile.order();
    let mut taken = vec![false; n];
    let mut pivots: Vec<(usize, RowKind)> = Vec::with_capacity(redundancy);
    for &j in &order[..n_static] {
        taken[j] = true;
        pivots.push((j, RowKind::Sfs));
    }
    for &j in &order[n_static..n_static + t_b] {
        taken[j] = true;
        pivots.push((j, RowKind::DfsB));
    }
    let mut remaining: Vec<usize> = (0..n).filter(|&j| !taken[j]).collect();
    if t_a > remaining.len() {
        return Err(Error::Construction(format!("t_A = {t_a} exceeds the {} remaining indices", remaining.len())));
    }
    remaining.sort_by(|&a, &b| index_weight(a).cmp(&index_weight(b)).then(b.cmp(&a)));
    pivots.extend(remaining[..t_a].iter().map(|&j| (j, RowKind::DfsA)));

    let rows = pivots
        .into_iter()
        .enumerate()
        .map(|(row_index, (pivot, kind))| {
            if kind == RowKind::Sfs {
                return Ok(ConstraintRow::unit(n, pivot));
            }
            let mut rng = stream_rng(seed, row_index as u64);
            let mut coeffs = BitVector::zeros(n);
            for s in 0..pivot {
                if rng.gen::<bool>() {
                    coeffs.set(s, true);
                }
            }
            coeffs.set(pivot, true);
            ConstraintRow::new(pivot, coeffs, kind)
        })
        .collect::<Result<Vec<_>>>()?;
    PolarSubcode::new(ConstraintMatrix::new(n, rows)?, profile.design_p(), seed)
}
