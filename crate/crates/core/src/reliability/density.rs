//! Exact min-sum density evolution over a BSC.
//!
//! With channel LLRs `±L₀`, every min-sum message is an integer multiple of
//! `L₀`, so a message density is a probability mass function over integer
//! levels. Check nodes map `(a, b)` to `sign(a)·sign(b)·min(|a|, |b|)` and
//! variable nodes to `a + b`; both are evaluated exactly, and the only
//! approximation is dropping negligible tail levels.

use super::ReliabilityProfile;
use crate::error::{Error, Result};

pub const DEFAULT_PRUNE_EPS: f64 = 1e-12;
pub const DEFAULT_SUPPORT_CAP: usize = 4096;
pub const MAX_LEVELS: usize = 20;

/// Probability mass over the contiguous integer levels
/// `min_level .. min_level + mass.len()` (units of `L₀ = ln((1 − p)/p)`).
#[derive(Clone, Debug, PartialEq)]
pub struct LlrDistribution {
    min_level: i64,
    mass: Vec<f64>,
}

impl LlrDistribution {
    /// Channel density for the all-zero word: `+1` w.p. `1 − p`, `−1` w.p. `p`.
    pub fn channel(p: f64) -> Self {
        Self { min_level: -1, mass: vec![p, 0.0, 1.0 - p] }
    }

    pub fn min_level(&self) -> i64 {
        self.min_level
    }

    pub fn max_level(&self) -> i64 {
        self.min_level + self.mass.len() as i64 - 1
    }

    pub fn mass_at(&self, level: i64) -> f64 {
        let idx = level - self.min_level;
        if idx < 0 || idx >= self.mass.len() as i64 {
            0.0
        } else {
            self.mass[idx as usize]
        }
    }

    pub fn total_mass(&self) -> f64 {
        self.mass.iter().sum()
    }

    /// `E[|λ|·1{λ < 0}]` in units of `L₀`: the mean min-sum penalty paid by
    /// the correct (zero) decision.
    pub fn expected_penalty(&self) -> f64 {
        self.mass
            .iter()
            .enumerate()
            .map(|(i, &m)| (self.min_level + i as i64, m))
            .filter(|&(level, _)| level < 0)
            .map(|(level, m)| -level as f64 * m)
            .sum()
    }

    /// Mass on negative levels plus half the mass at level zero.
    pub fn error_probability(&self) -> f64 {
        let mut pe = 0.0;
        for (i, &m) in self.mass.iter().enumerate() {
            let level = self.min_level + i as i64;
            if level < 0 {
                pe += m;
            } else if level == 0 {
                pe += 0.5 * m;
            } else {
                break;
            }
        }
        pe.clamp(0.0, 0.5)
    }

    /// Density of `sign(a)·sign(b)·min(|a|, |b|)` for independent `a ~ self`, `b ~ other`.
    pub fn check_node(&self, other: &Self) -> Self {
        let max_abs = |d: &Self| d.min_level.abs().max(d.max_level().abs());
        let top = max_abs(self).min(max_abs(other));
        let mut out = vec![0.0; (2 * top + 1) as usize];
        for (i, &ma) in self.mass.iter().enumerate() {
            if ma == 0.0 {
                continue;
            }
            let a = self.min_level + i as i64;
            for (j, &mb) in other.mass.iter().enumerate() {
                if mb == 0.0 {
                    continue;
                }
                let b = other.min_level + j as i64;
                let level = a.signum() * b.signum() * a.abs().min(b.abs());
                out[(level + top) as usize] += ma * mb;
            }
        }
        Self { min_level: -top, mass: out }
    }

    /// Density of `a + b` for independent `a ~ self`, `b ~ other`.
    pub fn variable_node(&self, other: &Self) -> Self {
        let mut out = vec![0.0; self.mass.len() + other.mass.len() - 1];
        for (i, &ma) in self.mass.iter().enumerate() {
            if ma == 0.0 {
                continue;
            }
            for (j, &mb) in other.mass.iter().enumerate() {
                out[i + j] += ma * mb;
            }
        }
        Self { min_level: self.min_level + other.min_level, mass: out }
    }

    /// Drops end levels lighter than `eps`, then folds the positive tail
    /// inward until at most `cap` levels remain. Returns the dropped mass.
    pub fn prune(&mut self, eps: f64, cap: usize) -> f64 {
        let mut dropped = 0.0;
        let mut lo = 0;
        let mut hi = self.mass.len();
        while hi - lo > 1 && self.mass[lo] < eps {
            dropped += self.mass[lo];
            lo += 1;
        }
        while hi - lo > 1 && self.mass[hi - 1] < eps {
            dropped += self.mass[hi - 1];
            hi -= 1;
        }
        let cap = cap.max(3);
        if hi - lo > cap {
            // Keep levels nearest the low end; reliable positive mass is
            // moved to the largest kept level, which leaves the error
            // probability of this message unchanged.
            let fold: f64 = self.mass[lo + cap..hi].iter().sum();
            hi = lo + cap;
            self.mass[hi - 1] += fold;
        }
        self.min_level += lo as i64;
        self.mass.truncate(hi);
        self.mass.drain(..lo);
        dropped
    }
}

/// Settings for [`density_evolution_minsum_with`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityEvolution {
    pub prune_eps: f64,
    pub support_cap: usize,
}

impl Default for DensityEvolution {
    fn default() -> Self {
        Self { prune_eps: DEFAULT_PRUNE_EPS, support_cap: DEFAULT_SUPPORT_CAP }
    }
}

/// Per-subchannel error probability of genie-aided min-sum SC over BSC(`p`)
/// for length `2^m`.
pub fn density_evolution_minsum(p: f64, m: usize, prune_eps: f64) -> Result<ReliabilityProfile> {
    density_evolution_minsum_with(p, m, DensityEvolution { prune_eps, ..Default::default() })
}

pub fn density_evolution_minsum_with(p: f64, m: usize, cfg: DensityEvolution) -> Result<ReliabilityProfile> {
    check_inputs(p, m, &cfg)?;
    let mut p_err = vec![0.0; 1 << m];
    descend(&LlrDistribution::channel(p), m, 0, &cfg, &mut |i, d| p_err[i] = d.error_probability());
    ReliabilityProfile::from_error_rates(p, p_err)
}

/// Per-subchannel expected min-sum penalty of the correct decision under
/// genie-aided SC over BSC(`p`), in units of `L₀ = ln((1 − p)/p)`.
pub fn expected_penalties(p: f64, m: usize, prune_eps: f64) -> Result<Vec<f64>> {
    let cfg = DensityEvolution { prune_eps, ..Default::default() };
    check_inputs(p, m, &cfg)?;
    let mut out = vec![0.0; 1 << m];
    descend(&LlrDistribution::channel(p), m, 0, &cfg, &mut |i, d| out[i] = d.expected_penalty());
    Ok(out)
}

fn check_inputs(p: f64, m: usize, cfg: &DensityEvolution) -> Result<()> {
    if !(p > 0.0 && p < 0.5) {
        return Err(Error::ProbabilityDomain { value: p, domain: "(0, 0.5)" });
    }
    if m > MAX_LEVELS {
        return Err(Error::InvalidParameter(format!(
            "m = {m} exceeds the density-evolution limit of {MAX_LEVELS} levels"
        )));
    }
    if cfg.prune_eps.is_nan() || cfg.prune_eps < 0.0 {
        return Err(Error::InvalidParameter(format!("prune_eps = {}", cfg.prune_eps)));
    }
    Ok(())
}

/// Subchannel indices read MSB first: bit `m − 1` selects the first stage
/// (0 = check node, 1 = variable node).
fn descend(
    d: &LlrDistribution,
    remaining: usize,
    prefix: usize,
    cfg: &DensityEvolution,
    leaf: &mut dyn FnMut(usize, &LlrDistribution),
) {
    if remaining == 0 {
        leaf(prefix, d);
        return;
    }
    for (bit, mut child) in [(0, d.check_node(d)), (1, d.variable_node(d))] {
        debug_assert!((child.total_mass() - d.total_mass() * d.total_mass()).abs() < 1e-9);
        child.prune(cfg.prune_eps, cfg.support_cap);
        descend(&child, remaining - 1, (prefix << 1) | bit, cfg, leaf);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn one_level_closed_form() {
        let prof = density_evolution_minsum(0.1, 1, DEFAULT_PRUNE_EPS).unwrap();
        assert!((prof.p_err()[0] - 0.18).abs() < 1e-9);
        assert!((prof.p_err()[1] - 0.10).abs() < 1e-9);
        assert_eq!(prof.order(), &[0, 1]);
    }

    #[test]
    fn expected_penalty_closed_form() {
        // m = 1, p = 0.1: check node is -1 w.p. 0.18, variable node is -2 w.p. 0.01.
        let e = expected_penalties(0.1, 1, DEFAULT_PRUNE_EPS).unwrap();
        assert!((e[0] - 0.18).abs() < 1e-12);
        assert!((e[1] - 0.02).abs() < 1e-12);
        assert!((expected_penalties(0.2, 0, 0.0).unwrap()[0] - 0.2).abs() < 1e-15);
    }

    #[test]
    fn zero_levels_is_the_raw_channel() {
        for p in [0.01, 0.2, 0.49] {
            let prof = density_evolution_minsum(p, 0, DEFAULT_PRUNE_EPS).unwrap();
            assert_eq!(prof.p_err(), &[p]);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(density_evolution_minsum(0.0, 3, 1e-12).is_err());
        assert!(density_evolution_minsum(0.5, 3, 1e-12).is_err());
        assert!(density_evolution_minsum(0.1, 21, 1e-12).is_err());
    }

    #[test]
    fn mass_is_conserved_and_pruning_is_bounded() {
        let eps = 1e-12;
        let mut d = LlrDistribution::channel(0.07);
        let mut dropped_total = 0.0;
        for stage in 0..9 {
            let next = if stage % 2 == 0 { d.variable_node(&d) } else { d.check_node(&d) };
            assert!((next.total_mass() - 1.0).abs() < 1e-9 + dropped_total);
            d = next;
            let dropped = d.prune(eps, DEFAULT_SUPPORT_CAP);
            assert!(dropped < 512.0 * eps);
            dropped_total += dropped;
        }
    }

    #[test]
    fn support_cap_folds_positive_tail() {
        let mut d = LlrDistribution { min_level: -2, mass: vec![0.1; 10] };
        let pe = d.error_probability();
        d.prune(0.0, 4);
        assert_eq!(d.mass.len(), 4);
        assert!((d.total_mass() - 1.0).abs() < 1e-12);
        assert!((d.error_probability() - pe).abs() < 1e-12);
    }

    #[test]
    fn extreme_subchannels_bracket_the_channel() {
        for &p in &[0.05, 0.1, 0.2] {
            let prof = density_evolution_minsum(p, 6, DEFAULT_PRUNE_EPS).unwrap();
            let n = prof.n();
            assert!(prof.p_err()[n - 1] <= p);
            assert!(prof.p_err()[0] >= p);
        }
    }

    #[test]
    fn degradation_is_monotone() {
        let slack = 256.0 * DEFAULT_PRUNE_EPS;
        for m in [3, 5, 8] {
            let grid = [0.02, 0.05, 0.1, 0.15, 0.25, 0.4];
            for w in grid.windows(2) {
                let a = density_evolution_minsum(w[0], m, DEFAULT_PRUNE_EPS).unwrap();
                let b = density_evolution_minsum(w[1], m, DEFAULT_PRUNE_EPS).unwrap();
                for (x, y) in a.p_err().iter().zip(b.p_err()) {
                    assert!(y + slack >= *x, "m={m} p={:?}: {x} > {y}", w);
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn extremes_bracket_and_degradation_is_monotone(m in 1usize..=6, p in 0.01f64..0.45, dp in 0.001f64..0.04) {
            let slack = 256.0 * DEFAULT_PRUNE_EPS;
            let a = density_evolution_minsum(p, m, DEFAULT_PRUNE_EPS).unwrap();
            let b = density_evolution_minsum((p + dp).min(0.499), m, DEFAULT_PRUNE_EPS).unwrap();
            let n = a.n();
            prop_assert!(a.p_err()[n - 1] <= p + slack);
            prop_assert!(a.p_err()[0] + slack >= p);
            for (x, y) in a.p_err().iter().zip(b.p_err()) {
                prop_assert!(y + slack >= *x);
            }
        }
    }
}
