//! Monte Carlo plumbing: seeded per-trial RNG streams, parallel trial loops
//! with additive merging, and binomial confidence intervals.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Trials are grouped into fixed chunks so results never depend on the
/// number of worker threads.
const CHUNK: u64 = 256;

/// 97.5% standard normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

/// Deterministic RNG for `(seed, stream)`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Derives an independent sub-seed, e.g. one per experiment arm or grid point.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    // splitmix64 finaliser over the pair
    let mut z = seed ^ tag.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(0x632b_e59b_d9b4_e5fd);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Runs `trials` independent trials in parallel. Trial `t` receives
/// `stream_rng(seed, t)`, so the same trial index always sees the same
/// randomness (paired experiments reuse seeds across arms).
pub fn run_trials<A, F, M>(trials: u64, seed: u64, identity: A, trial: F, merge: M) -> A
where
    A: Clone + Send + Sync,
    F: Fn(u64, &mut ChaCha8Rng, &mut A) + Sync,
    M: Fn(A, A) -> A + Sync,
{
    let chunks = trials.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = identity.clone();
            let end = ((c + 1) * CHUNK).min(trials);
            for t in c * CHUNK..end {
                let mut rng = stream_rng(seed, t);
                trial(t, &mut rng, &mut acc);
            }
            acc
        })
        .reduce(|| identity.clone(), &merge)
}

/// Wilson score interval for `errors` out of `trials` at 95% confidence.
pub fn wilson_interval(errors: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let phat = errors as f64 / n;
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / n;
    let center = (phat + z2 / (2.0 * n)) / denom;
    let half = Z_95 * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if errors == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if errors == trials { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

/// Error/trial tally with decoder operation counters.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ErrorTally {
    pub trials: u64,
    pub errors: u64,
    pub sum_ops: u64,
    pub comp_ops: u64,
    pub degraded: u64,
}

impl ErrorTally {
    pub fn merge(mut self, other: ErrorTally) -> ErrorTally {
        self.trials += other.trials;
        self.errors += other.errors;
        self.sum_ops += other.sum_ops;
        self.comp_ops += other.comp_ops;
        self.degraded += other.degraded;
        self
    }

    pub fn rate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.errors as f64 / self.trials as f64
        }
    }

    pub fn interval(&self) -> (f64, f64) {
        wilson_interval(self.errors, self.trials)
    }

    pub fn mean_sum_ops(&self) -> f64 {
        self.sum_ops as f64 / self.trials.max(1) as f64
    }

    pub fn mean_comp_ops(&self) -> f64 {
        self.comp_ops as f64 / self.trials.max(1) as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn wilson_brackets_estimate() {
        let (lo, hi) = wilson_interval(10, 1000);
        assert!(lo < 0.01 && hi > 0.01);
        assert!(lo > 0.004 && hi < 0.02);
        let (lo, hi) = wilson_interval(0, 1000);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.005);
    }

    #[test]
    fn trials_are_reproducible_and_paired() {
        let run = |seed| run_trials(1000, seed, 0u64, |_, rng, acc| *acc += rng.gen_range(0..10u64), |a, b| a + b);
        assert_eq!(run(5), run(5));
        assert_ne!(run(5), run(6));
        let a: u64 = stream_rng(7, 3).gen();
        let b: u64 = stream_rng(7, 3).gen();
        assert_eq!(a, b);
        assert_ne!(derive_seed(1, 2), derive_seed(1, 3));
    }
}
