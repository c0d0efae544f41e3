use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::reliability::{expected_penalties, DEFAULT_PRUNE_EPS};

use super::list::penalize;
use super::sc::{check_llrs, hard, outcome, ScState};
use super::{DecodeOutcome, FrozenSchedule, OpCounters};

/// Cumulative score bias for decoding at crossover `p`: `bias[φ]` is the
/// expected metric of the correct path after `φ` phases, from min-sum density
/// evolution. `bias` has length `n + 1`.
pub fn sequential_bias(p: f64, m: usize) -> Result<Vec<f64>> {
    let l0 = ((1.0 - p) / p).ln();
    let mut acc = 0.0;
    let mut bias = vec![0.0];
    for e in expected_penalties(p, m, DEFAULT_PRUNE_EPS)? {
        acc += l0 * e;
        bias.push(acc);
    }
    Ok(bias)
}

struct Entry {
    score: f64,
    seq: u64,
    phase: usize,
    metric: f64,
    state: ScState,
}

/// Decides frozen phases from `phase` on until the next information phase.
fn advance_frozen(
    state: &mut ScState,
    mut phase: usize,
    mut metric: f64,
    schedule: &FrozenSchedule,
    ops: &mut OpCounters,
) -> (usize, f64) {
    while phase < schedule.n() && schedule.is_frozen(phase) {
        let l = state.leaf_llr(phase, ops);
        let bit = schedule.frozen_value(phase, &state.u).expect("frozen");
        metric = penalize(metric, l, bit, ops);
        state.commit(phase, bit);
        phase += 1;
    }
    (phase, metric)
}

/// Best-first decoding over partial paths.
///
/// Paths are ranked by `metric − bias[phase]` (smaller first, earlier
/// insertion on ties). Each information phase may be expanded at most `list`
/// times and the queue keeps at most `queue` entries, evicting the worst. If
/// the queue runs dry before a full path is popped, the last discarded path is
/// completed by plain SC and the outcome is flagged as degraded.
pub fn sequential_decode(
    llrs: &[f64],
    schedule: &FrozenSchedule,
    bias: &[f64],
    list: usize,
    queue: usize,
) -> Result<DecodeOutcome> {
    if list == 0 || queue == 0 {
        return Err(Error::InvalidParameter("list and queue sizes must be at least 1".into()));
    }
    check_llrs(llrs, schedule)?;
    let n = schedule.n();
    if bias.len() != n + 1 {
        return Err(Error::LengthMismatch { left: bias.len(), right: n + 1 });
    }
    let mut ops = OpCounters::default();
    let mut visits = vec![0usize; n];
    // Sorted worst first so the best entry pops from the back.
    let mut q: Vec<Entry> = Vec::with_capacity(queue.min(4096));
    let mut seq = 0u64;

    let push = |q: &mut Vec<Entry>, e: Entry, ops: &mut OpCounters| {
        // Entries with (score, seq) larger sort towards the front.
        let pos = q.partition_point(|x| {
            ops.comps += 1;
            match x.score.partial_cmp(&e.score).unwrap_or(Ordering::Equal) {
                Ordering::Greater => true,
                Ordering::Less => false,
                Ordering::Equal => x.seq > e.seq,
            }
        });
        if q.len() == queue {
            if pos == 0 {
                return; // worse than everything kept
            }
            q.insert(pos, e);
            q.remove(0);
        } else {
            q.insert(pos, e);
        }
    };

    let mut root = ScState::new(llrs)?;
    let (phase, metric) = advance_frozen(&mut root, 0, 0.0, schedule, &mut ops);
    push(&mut q, Entry { score: metric - bias[phase], seq, phase, metric, state: root }, &mut ops);
    seq += 1;

    while let Some(entry) = q.pop() {
        if entry.phase == n {
            return Ok(outcome(entry.state.into_u(), ops, 0, false));
        }
        visits[entry.phase] += 1;
        if visits[entry.phase] > list {
            if q.is_empty() {
                return Ok(complete_greedy(entry, schedule, ops));
            }
            continue;
        }
        let Entry { phase, metric, mut state, .. } = entry;
        let l = state.leaf_llr(phase, &mut ops);
        let one = state.clone();
        for (bit, mut st) in [(false, state), (true, one)] {
            let m = penalize(metric, l, bit, &mut ops);
            st.commit(phase, bit);
            let (next, m) = advance_frozen(&mut st, phase + 1, m, schedule, &mut ops);
            let child = Entry { score: m - bias[next], seq, phase: next, metric: m, state: st };
            seq += 1;
            push(&mut q, child, &mut ops);
        }
    }
    unreachable!("the queue only empties through the visit-limit branch")
}

fn complete_greedy(entry: Entry, schedule: &FrozenSchedule, mut ops: OpCounters) -> DecodeOutcome {
    let Entry { phase, mut state, .. } = entry;
    for i in phase..schedule.n() {
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
    outcome(state.into_u(), ops, 0, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codebuild::{build_randomized_psc, default_ta_tb, PolarSubcode};
    use crate::decode::{channel_llrs, sc_decode, scl_decode};
    use crate::gf2::BitVector;
    use crate::reliability::density_evolution_minsum;
    use crate::sim::stream_rng;

    fn setup(m: usize, k: usize, p: f64, seed: u64) -> (PolarSubcode, Vec<f64>) {
        let n = 1 << m;
        let prof = density_evolution_minsum(p, m, DEFAULT_PRUNE_EPS).unwrap();
        let (a, b) = default_ta_tb(m, n, k);
        (build_randomized_psc(n, k, &prof, a, b, seed).unwrap(), sequential_bias(p, m).unwrap())
    }

    #[test]
    fn bias_is_cumulative() {
        let b = sequential_bias(0.1, 1).unwrap();
        let l0 = 9f64.ln();
        assert_eq!(b.len(), 3);
        assert!((b[1] - 0.18 * l0).abs() < 1e-12);
        assert!((b[2] - 0.20 * l0).abs() < 1e-12);
    }

    #[test]
    fn bias_matches_mean_penalty_of_the_transmitted_path() {
        // Along the true path every decision is forced, so its metric is the
        // sum of genie penalties; its mean must follow the bias.
        let (code, bias) = setup(6, 20, 0.15, 3);
        let trials = 20_000;
        let mut total = 0.0;
        for t in 0..trials {
            let mut rng = stream_rng(14, t);
            let (u, x) = code.random_codeword(&mut rng);
            let y = x.xor(&BitVector::bernoulli(64, 0.15, &mut rng)).unwrap();
            let llr = channel_llrs(&y, 0.15).unwrap();
            let mut state = crate::decode::sc::ScState::new(&llr).unwrap();
            let mut ops = crate::decode::OpCounters::default();
            for i in 0..64 {
                let l = state.leaf_llr(i, &mut ops);
                total += penalize(0.0, l, u.get(i), &mut ops);
                state.commit(i, u.get(i));
            }
        }
        let mean = total / trials as f64;
        assert!((mean - bias[64]).abs() < 0.03 * bias[64], "{mean} vs {}", bias[64]);
    }

    #[test]
    fn noiseless_recovery() {
        let (code, bias) = setup(8, 64, 0.1, 3);
        let sched = code.schedule();
        let mut rng = stream_rng(4, 0);
        for _ in 0..20 {
            let (u, x) = code.random_codeword(&mut rng);
            let llr = channel_llrs(&x, 1e-6).unwrap();
            let out = sequential_decode(&llr, &sched, &bias, 4, 1024).unwrap();
            assert_eq!(out.u_hat, u);
            assert!(!out.degraded);
        }
    }

    #[test]
    fn not_worse_than_sc() {
        let (code, bias) = setup(8, 128, 0.1, 5);
        let sched = code.schedule();
        let (mut seq_err, mut sc_err) = (0u32, 0u32);
        for t in 0..4000 {
            let mut rng = stream_rng(6, t);
            let (_, x) = code.random_codeword(&mut rng);
            let y = x.xor(&BitVector::bernoulli(256, 0.1, &mut rng)).unwrap();
            let llr = channel_llrs(&y, 0.1).unwrap();
            let out = sequential_decode(&llr, &sched, &bias, 8, 1024).unwrap();
            assert!(sched.satisfied_by(&out.u_hat));
            seq_err += (out.x_hat != x) as u32;
            sc_err += (sc_decode(&llr, &sched).unwrap().x_hat != x) as u32;
        }
        assert!(seq_err as f64 <= 1.05 * sc_err as f64, "seq {seq_err} vs sc {sc_err}");
    }

    #[test]
    fn cheaper_than_list_at_low_rate() {
        let (code, bias) = setup(8, 64, 0.15, 2);
        let sched = code.schedule();
        let (mut seq_sums, mut scl_sums) = (0u64, 0u64);
        for t in 0..200 {
            let mut rng = stream_rng(9, t);
            let (_, x) = code.random_codeword(&mut rng);
            let y = x.xor(&BitVector::bernoulli(256, 0.15, &mut rng)).unwrap();
            let llr = channel_llrs(&y, 0.15).unwrap();
            seq_sums += sequential_decode(&llr, &sched, &bias, 8, 1024).unwrap().sum_count;
            scl_sums += scl_decode(&llr, &sched, 8).unwrap().sum_count;
        }
        assert!(seq_sums < scl_sums, "{seq_sums} vs {scl_sums}");
    }

    #[test]
    fn tiny_queue_still_returns_a_valid_word() {
        let (code, bias) = setup(6, 32, 0.2, 1);
        let sched = code.schedule();
        for t in 0..200 {
            let mut rng = stream_rng(10, t);
            let y = BitVector::random(64, &mut rng);
            let llr = channel_llrs(&y, 0.2).unwrap();
            let a = sequential_decode(&llr, &sched, &bias, 1, 1).unwrap();
            let b = sequential_decode(&llr, &sched, &bias, 1, 1).unwrap();
            assert!(sched.satisfied_by(&a.u_hat));
            assert_eq!(a, b);
        }
        assert!(sequential_decode(&[0.0; 64], &sched, &bias, 0, 1).is_err());
        assert!(sequential_decode(&[0.0; 64], &sched, &bias[1..], 1, 1).is_err());
    }
}
