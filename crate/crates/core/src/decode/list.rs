use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::gf2::BitVector;

use super::sc::{check_llrs, hard, outcome, ScState};
use super::{DecodeOutcome, FrozenSchedule, OpCounters};

/// A complete path returned by list decoding.
#[derive(Clone, Debug, PartialEq)]
pub struct ListPath {
    pub u: BitVector,
    pub metric: f64,
}

/// Final list of an SCL run, best metric first.
#[derive(Clone, Debug, PartialEq)]
pub struct ListDecode {
    pub paths: Vec<ListPath>,
    pub ops: OpCounters,
}

struct Candidate {
    parent: usize,
    bit: bool,
    metric: f64,
    /// Penalty added at this phase; separates candidates whose metrics only
    /// compare equal because of rounding.
    step: f64,
}

/// Adds the penalty for deciding `bit` against `llr`.
#[inline]
pub(crate) fn penalize(metric: f64, llr: f64, bit: bool, ops: &mut OpCounters) -> f64 {
    if bit != hard(llr) && llr != 0.0 {
        ops.sums += 1;
        metric + llr.abs()
    } else {
        metric
    }
}

fn counted_sort(cands: &mut [Candidate], ops: &mut OpCounters) {
    // Stable, so equal metrics keep (path index, 0-bit first) order.
    cands.sort_by(|a, b| {
        ops.comps += 1;
        a.metric
            .partial_cmp(&b.metric)
            .unwrap_or(Ordering::Equal)
            .then(a.step.partial_cmp(&b.step).unwrap_or(Ordering::Equal))
    });
}

/// SCL decoding keeping up to `list` paths; returns the final list sorted by
/// path metric.
pub fn scl_decode_list(llrs: &[f64], schedule: &FrozenSchedule, list: usize) -> Result<ListDecode> {
    if list == 0 {
        return Err(Error::InvalidParameter("list size must be at least 1".into()));
    }
    check_llrs(llrs, schedule)?;
    let mut ops = OpCounters::default();
    let mut paths = vec![ScState::new(llrs)?];
    let mut metrics = vec![0.0f64];
    let mut cands: Vec<Candidate> = Vec::with_capacity(2 * list);
    for i in 0..schedule.n() {
        let leaves: Vec<f64> = paths.iter_mut().map(|p| p.leaf_llr(i, &mut ops)).collect();
        if schedule.is_frozen(i) {
            for (p, state) in paths.iter_mut().enumerate() {
                let bit = schedule.frozen_value(i, &state.u).expect("frozen");
                metrics[p] = penalize(metrics[p], leaves[p], bit, &mut ops);
                state.commit(i, bit);
            }
            continue;
        }
        cands.clear();
        for (p, &l) in leaves.iter().enumerate() {
            for bit in [false, true] {
                let metric = penalize(metrics[p], l, bit, &mut ops);
                let step = if bit != hard(l) { l.abs() } else { 0.0 };
                cands.push(Candidate { parent: p, bit, metric, step });
            }
        }
        if cands.len() > list {
            counted_sort(&mut cands, &mut ops);
            cands.truncate(list);
        }
        let mut uses = vec![0usize; paths.len()];
        for c in &cands {
            uses[c.parent] += 1;
        }
        let mut old: Vec<Option<ScState>> = paths.drain(..).map(Some).collect();
        metrics.clear();
        for c in &cands {
            uses[c.parent] -= 1;
            let mut state = if uses[c.parent] == 0 {
                old[c.parent].take().expect("parent still present")
            } else {
                old[c.parent].clone().expect("parent still present")
            };
            state.commit(i, c.bit);
            paths.push(state);
            metrics.push(c.metric);
        }
    }
    let mut final_list: Vec<Candidate> =
        metrics.iter().enumerate().map(|(p, &metric)| Candidate { parent: p, bit: false, metric, step: 0.0 }).collect();
    if final_list.len() > 1 {
        counted_sort(&mut final_list, &mut ops);
    }
    let mut slots: Vec<Option<ScState>> = paths.into_iter().map(Some).collect();
    let paths = final_list
        .iter()
        .map(|c| ListPath { u: slots[c.parent].take().expect("unique").into_u(), metric: c.metric })
        .collect();
    Ok(ListDecode { paths, ops })
}

/// SCL decoding returning the best-metric path.
pub fn scl_decode(llrs: &[f64], schedule: &FrozenSchedule, list: usize) -> Result<DecodeOutcome> {
    let ListDecode { mut paths, ops } = scl_decode_list(llrs, schedule, list)?;
    let best = paths.swap_remove(0);
    Ok(outcome(best.u, ops, 0, false))
}
