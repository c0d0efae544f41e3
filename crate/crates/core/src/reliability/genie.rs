//! Monte Carlo estimate of genie-aided SC subchannel error rates, used as an
//! independent check on density evolution.

use rand::Rng;
use statrs::function::erf::erfc;

use super::ReliabilityProfile;
use crate::error::{Error, Result};
use crate::sim::run_trials;

pub const MIN_GENIE_TRIALS: u64 = 10_000;

#[derive(Clone, Default)]
struct Stats {
    errors: Vec<u64>,
    ties: Vec<u64>,
    sum: Vec<i64>,
    sum_sq: Vec<f64>,
}

impl Stats {
    fn new(n: usize) -> Self {
        Self { errors: vec![0; n], ties: vec![0; n], sum: vec![0; n], sum_sq: vec![0.0; n] }
    }

    fn merge(mut self, o: Stats) -> Stats {
        for i in 0..self.errors.len() {
            self.errors[i] += o.errors[i];
            self.ties[i] += o.ties[i];
            self.sum[i] += o.sum[i];
            self.sum_sq[i] += o.sum_sq[i];
        }
        self
    }
}

/// Sends the all-zero word through BSC(`p`) and runs min-sum SC with every
/// earlier bit replaced by its true value, recording per-position errors.
///
/// The estimate is `(errors + ties / 2) / trials`. Positions that never err
/// in the run are ranked below every observed one by the Gaussian tail
/// `Q(μ/σ) / (2·trials)` of their simulated LLRs, so sub-`1/trials`
/// subchannels keep a meaningful order.
pub fn genie_sc_error_rates(p: f64, m: usize, trials: u64, seed: u64) -> Result<ReliabilityProfile> {
    if !(p > 0.0 && p < 0.5) {
        return Err(Error::ProbabilityDomain { value: p, domain: "(0, 0.5)" });
    }
    if trials < MIN_GENIE_TRIALS {
        return Err(Error::InvalidParameter(format!(
            "genie oracle needs at least {MIN_GENIE_TRIALS} trials, got {trials}"
        )));
    }
    if m > 16 {
        return Err(Error::InvalidParameter(format!("m = {m} too large for the genie oracle")));
    }
    let n = 1usize << m;
    let stats = run_trials(
        trials,
        seed,
        Stats::new(n),
        |_, rng, acc| {
            let channel: Vec<i32> = (0..n).map(|_| if rng.gen::<f64>() < p { -1 } else { 1 }).collect();
            let mut bufs: Vec<Vec<i32>> = (0..=m).map(|d| vec![0; n >> d]).collect();
            bufs[0].copy_from_slice(&channel);
            genie_descend(&mut bufs, 0, 0, acc);
        },
        Stats::merge,
    );
    let t = trials as f64;
    let p_err = (0..n)
        .map(|i| {
            let observed = stats.errors[i] as f64 + 0.5 * stats.ties[i] as f64;
            if observed > 0.0 {
                return (observed / t).min(0.5);
            }
            let mean = stats.sum[i] as f64 / t;
            let var = (stats.sum_sq[i] / t - mean * mean).max(0.0);
            if var == 0.0 {
                return 0.0;
            }
            let q = 0.5 * erfc(mean / var.sqrt() / std::f64::consts::SQRT_2);
            q / (2.0 * t)
        })
        .collect();
    ReliabilityProfile::from_error_rates(p, p_err)
}

/// All decided bits are zero, so the partial-sum sign in `g` is always `+`.
fn genie_descend(bufs: &mut [Vec<i32>], depth: usize, prefix: usize, acc: &mut Stats) {
    if depth + 1 == bufs.len() {
        let l = bufs[depth][0];
        let i = prefix;
        match l.cmp(&0) {
            std::cmp::Ordering::Less => acc.errors[i] += 1,
            std::cmp::Ordering::Equal => acc.ties[i] += 1,
            std::cmp::Ordering::Greater => {}
        }
        acc.sum[i] += l as i64;
        acc.sum_sq[i] += (l as f64) * (l as f64);
        return;
    }
    let (upper, lower) = bufs.split_at_mut(depth + 1);
    let parent = &upper[depth];
    let child = &mut lower[0];
    let h = child.len();
    for j in 0..h {
        let (a, b) = (parent[j], parent[j + h]);
        child[j] = a.signum() * b.signum() * a.abs().min(b.abs());
    }
    genie_descend(bufs, depth + 1, prefix << 1, acc);
    let (upper, lower) = bufs.split_at_mut(depth + 1);
    let parent = &upper[depth];
    let child = &mut lower[0];
    for j in 0..h {
        child[j] = parent[j] + parent[j + h];
    }
    genie_descend(bufs, depth + 1, (prefix << 1) | 1, acc);
}
