use super::{build_randomized_psc, default_ta_tb, stack_nested, NestedCodePair, PolarSubcode, RowKind};
use crate::decode::{channel_llrs, quantize_with, Decoder, DecoderKind, OpCounters, DEFAULT_QUEUE};
use crate::error::{Error, Result};
use crate::gf2::{inverse_star, log2_len, polar_transform, BitVector};
use crate::reliability::{density_evolution_minsum, ReliabilityProfile, DEFAULT_PRUNE_EPS};
use crate::sim::{derive_seed, run_trials, ErrorTally};

const TAG_CODE: u64 = 0x636f_6465;
const TAG_BLER: u64 = 0x626c_6572;
const TAG_SOURCE: u64 = 0x7372_6365;

/// Inputs of the nested-code design procedure.
#[derive(Clone, Debug, PartialEq)]
pub struct DesignParams {
    pub p_a: f64,
    pub n: usize,
    pub k: usize,
    pub target_pb: f64,
    pub decoder: DecoderKind,
    /// Design crossovers of the candidate low-rate codes.
    pub p_grid: Vec<f64>,
    /// Channel crossovers at which candidate BLERs are measured, ascending.
    pub ptilde_grid: Vec<f64>,
    pub trials: u64,
    pub quant_trials: u64,
    /// Quantizer list size; defaults to the decoder list size.
    pub quant_list: Option<usize>,
    pub t_a: Option<usize>,
    pub t_b: Option<usize>,
    pub seed: u64,
}

/// Eight evenly spaced points in `(p_A + 0.01, min(0.5, p_A + 0.25)]`.
pub fn default_p_grid(p_a: f64) -> Vec<f64> {
    let lo = p_a + 0.01;
    let hi = (p_a + 0.25).min(0.5);
    (1..=8).map(|i| lo + (hi - lo) * i as f64 / 8.0).collect()
}

/// Steps of 0.005 from `p_A + 0.005` up to `min(0.5, p_A + 0.25)`.
pub fn default_ptilde_grid(p_a: f64) -> Vec<f64> {
    let hi = (p_a + 0.25).min(0.5);
    (1..).map(|i| p_a + 0.005 * i as f64).take_while(|&p| p <= hi + 1e-12).map(|p| p.min(0.5)).collect()
}

impl DesignParams {
    /// Parameters with default grids, `30 / target_pb` BLER trials per point,
    /// 2000 quantization trials and the sequential decoder.
    pub fn new(p_a: f64, n: usize, k: usize, target_pb: f64, list: usize, seed: u64) -> Self {
        Self {
            p_a,
            n,
            k,
            target_pb,
            decoder: DecoderKind::Sequential { list, queue: DEFAULT_QUEUE },
            p_grid: default_p_grid(p_a),
            ptilde_grid: default_ptilde_grid(p_a),
            trials: (30.0 / target_pb).ceil() as u64,
            quant_trials: 2000,
            quant_list: None,
            t_a: None,
            t_b: None,
            seed,
        }
    }

    pub fn quantizer_list(&self) -> usize {
        self.quant_list.unwrap_or(self.decoder.list())
    }

    pub fn validate(&self) -> Result<()> {
        log2_len(self.n)?;
        if !(self.p_a > 0.0 && self.p_a < 0.5) {
            return Err(Error::ProbabilityDomain { value: self.p_a, domain: "(0, 0.5)" });
        }
        if self.k > self.n {
            return Err(Error::InvalidParameter(format!("k = {} exceeds n = {}", self.k, self.n)));
        }
        if !(self.target_pb > 0.0 && self.target_pb < 1.0) {
            return Err(Error::ProbabilityDomain { value: self.target_pb, domain: "(0, 1)" });
        }
        for &p in self.p_grid.iter().chain(&self.ptilde_grid) {
            if !(p > self.p_a && p <= 0.5) {
                return Err(Error::InvalidParameter(format!("grid point {p} outside (p_A, 0.5]")));
            }
        }
        if self.p_grid.is_empty() || self.ptilde_grid.is_empty() {
            return Err(Error::InvalidParameter("empty grid".into()));
        }
        if self.ptilde_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter("BLER grid must be strictly ascending".into()));
        }
        if self.decoder.list() == 0 || self.quantizer_list() == 0 {
            return Err(Error::InvalidParameter("list size must be at least 1".into()));
        }
        if let DecoderKind::Sequential { queue: 0, .. } = self.decoder {
            return Err(Error::InvalidParameter("queue size must be at least 1".into()));
        }
        if (self.trials as f64) * self.target_pb < 20.0 {
            return Err(Error::InvalidParameter(format!(
                "{} trials give fewer than 20 expected errors at P_B = {:e}",
                self.trials, self.target_pb
            )));
        }
        if self.quant_trials == 0 {
            return Err(Error::InvalidParameter("quantization trials must be positive".into()));
        }
        Ok(())
    }
}

/// Monte Carlo block-error rate of `code` over BSC(`p`). Each trial encodes
/// uniformly random information bits.
pub fn simulate_bler(code: &PolarSubcode, decoder: DecoderKind, p: f64, trials: u64, seed: u64) -> Result<ErrorTally> {
    let decoder = Decoder::new(decoder, code.n(), p)?;
    let schedule = code.schedule();
    channel_llrs(&BitVector::zeros(1), p)?;
    let n = code.n();
    Ok(run_trials(
        trials,
        seed,
        ErrorTally::default(),
        |_, rng, acc| {
            let u = schedule.encode(&BitVector::random(code.k(), rng)).expect("k bits");
            let x = polar_transform(&u).expect("power of two");
            let y = x.xor(&BitVector::bernoulli(n, p, rng)).expect("equal lengths");
            let out = decoder.decode(&channel_llrs(&y, p).expect("checked"), &schedule).expect("valid input");
            acc.trials += 1;
            acc.errors += (out.x_hat != x) as u64;
            acc.sum_ops += out.sum_count;
            acc.comp_ops += out.comp_count;
            acc.degraded += out.degraded as u64;
        },
        ErrorTally::merge,
    ))
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlerPoint {
    pub p: f64,
    pub tally: ErrorTally,
}

/// Measured BLER curve and the interpolated crossover, if bracketed.
#[derive(Clone, Debug, PartialEq)]
pub struct PcSearch {
    pub points: Vec<BlerPoint>,
    pub pc: Option<f64>,
}

/// Crossover at which BLER reaches `target`, interpolating linearly in
/// `(p, ln BLER)` between the last point at or below target and the first
/// point above it. Points must be ascending in `p`. Returns `None` when the
/// first point is already above target or no point exceeds it. A zero-error
/// lower point is returned as is.
pub fn interpolate_pc(points: &[(f64, f64)], target: f64) -> Option<f64> {
    let j = points.iter().position(|&(_, b)| b > target)?;
    if j == 0 {
        return None;
    }
    let (p0, b0) = points[j - 1];
    let (p1, b1) = points[j];
    if b0 <= 0.0 {
        return Some(p0);
    }
    let t = (target.ln() - b0.ln()) / (b1.ln() - b0.ln());
    Some(p0 + t * (p1 - p0))
}

/// Measures BLER on `grid` in ascending order, stopping after the first point
/// above `target`.
pub fn search_pc(
    code: &PolarSubcode,
    decoder: DecoderKind,
    target: f64,
    grid: &[f64],
    trials: u64,
    seed: u64,
) -> Result<PcSearch> {
    let mut points = Vec::new();
    for &p in grid {
        let tally = simulate_bler(code, decoder, p, trials, seed)?;
        let above = tally.rate() > target;
        points.push(BlerPoint { p, tally });
        if above {
            break;
        }
    }
    let curve: Vec<(f64, f64)> = points.iter().map(|b| (b.p, b.tally.rate())).collect();
    Ok(PcSearch { pc: interpolate_pc(&curve, target), points })
}

/// Crossover `p_c` at which `code` reaches block-error rate `target`.
pub fn find_pc(
    code: &PolarSubcode,
    decoder: DecoderKind,
    target: f64,
    grid: &[f64],
    trials: u64,
    seed: u64,
) -> Result<f64> {
    let search = search_pc(code, decoder, target, grid, trials, seed)?;
    search.pc.ok_or_else(|| not_bracketed(target, &search.points))
}

fn not_bracketed<'a>(target: f64, points: impl IntoIterator<Item = &'a BlerPoint>) -> Error {
    let rates: Vec<f64> = points.into_iter().map(|b| b.tally.rate()).collect();
    Error::NotBracketed {
        target,
        lo: rates.iter().copied().fold(f64::INFINITY, f64::min),
        hi: rates.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    }
}

/// Order in which indices leave the quantizer's frozen set: key indices, then
/// dynamic pivots, then static pivots, each most reliable first under
/// `profile`. The quantizer with `f` free indices is frozen on `order[f..]`.
pub fn unfreeze_order(code: &PolarSubcode, profile: &ReliabilityProfile) -> Result<Vec<usize>> {
    if profile.n() != code.n() {
        return Err(Error::LengthMismatch { left: profile.n(), right: code.n() });
    }
    let mut class = vec![0u8; code.n()];
    for row in code.matrix().rows() {
        class[row.pivot()] = if row.kind() == RowKind::Sfs { 2 } else { 1 };
    }
    let most_reliable_first: Vec<usize> = profile.order().iter().rev().copied().collect();
    let mut order = Vec::with_capacity(code.n());
    for c in 0..3u8 {
        order.extend(most_reliable_first.iter().copied().filter(|&j| class[j] == c));
    }
    Ok(order)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DistortionStat {
    pub trials: u64,
    /// Mean of `d(x, x_q) / n` over the source words.
    pub q_bar: f64,
    pub ops: OpCounters,
}

/// Mean quantization distortion of the polar code frozen on `frozen` over
/// `trials` uniform source words. Source word `t` depends only on
/// `(seed, t)`, so calls with equal seeds are paired.
pub fn mean_distortion(
    n: usize,
    frozen: &[usize],
    p1: f64,
    list: usize,
    trials: u64,
    seed: u64,
) -> Result<DistortionStat> {
    let schedule = PolarSubcode::polar_code(n, frozen, p1)?.schedule();
    channel_llrs(&BitVector::zeros(1), p1)?;
    if list == 0 || trials == 0 {
        return Err(Error::InvalidParameter("list size and trials must be positive".into()));
    }
    let (dist, sums, comps) = run_trials(
        trials,
        seed,
        (0u64, 0u64, 0u64),
        |_, rng, acc| {
            let x = BitVector::random(n, rng);
            let q = quantize_with(&x, &schedule, p1, list).expect("valid input");
            acc.0 += q.distortion as u64;
            acc.1 += q.ops.sums;
            acc.2 += q.ops.comps;
        },
        |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2),
    );
    Ok(DistortionStat { trials, q_bar: dist as f64 / (trials as f64 * n as f64), ops: OpCounters { sums, comps } })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CandidateReport {
    pub design_p: f64,
    pub code_seed: u64,
    pub search: PcSearch,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DistortionPoint {
    /// `n − m1`: number of indices not frozen in the quantizer.
    pub free: usize,
    pub q_bar: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DesignReport {
    pub p_bar: f64,
    pub pc_bar: f64,
    pub expected_q: f64,
    pub p1: f64,
    pub m1: usize,
    pub m2: usize,
    pub candidates: Vec<CandidateReport>,
    pub trace: Vec<DistortionPoint>,
}

/// Designs a nested pair: candidate low-rate subcodes per design crossover,
/// selection by largest `p_c`, target distortion `E[q]`, and greedy removal of
/// static indices from the quantizer's frozen set until the paired mean
/// distortion falls to `E[q]`.
pub fn design_nested(params: &DesignParams) -> Result<(NestedCodePair, DesignReport)> {
    params.validate()?;
    let (n, k) = (params.n, params.k);
    let m = log2_len(n)?;
    let (da, db) = default_ta_tb(m, n, k);
    let (t_a, t_b) = (params.t_a.unwrap_or(da), params.t_b.unwrap_or(db));

    let bler_seed = derive_seed(params.seed, TAG_BLER);
    let mut candidates = Vec::with_capacity(params.p_grid.len());
    let mut best: Option<(usize, f64, PolarSubcode)> = None;
    for (ci, &p) in params.p_grid.iter().enumerate() {
        let profile = density_evolution_minsum(p, m, DEFAULT_PRUNE_EPS)?;
        let code_seed = derive_seed(params.seed, TAG_CODE + ci as u64);
        let code = build_randomized_psc(n, k, &profile, t_a, t_b, code_seed)?;
        let search = search_pc(&code, params.decoder, params.target_pb, &params.ptilde_grid, params.trials, bler_seed)?;
        if let Some(pc) = search.pc {
            if best.as_ref().is_none_or(|b| pc > b.1) {
                best = Some((ci, pc, code));
            }
        }
        candidates.push(CandidateReport { design_p: p, code_seed, search });
    }
    let Some((ci, pc_bar, lowrate)) = best else {
        return Err(not_bracketed(params.target_pb, candidates.iter().flat_map(|c| &c.search.points)));
    };
    let p_bar = params.p_grid[ci];
    let step5 = QuantizerDesign {
        p_a: params.p_a,
        p_bar,
        pc_bar,
        list: params.quantizer_list(),
        trials: params.quant_trials,
        seed: params.seed,
    };
    let (pair, part) = design_quantizer(&lowrate, &step5)?;
    let report = DesignReport { candidates, ..part };
    Ok((pair, report))
}

/// Inputs of the quantizer half of the design (target distortion and frozen
/// set selection) for an already chosen low-rate code.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantizerDesign {
    pub p_a: f64,
    /// Design crossover of the low-rate code.
    pub p_bar: f64,
    /// Crossover at which the low-rate code meets the target BLER.
    pub pc_bar: f64,
    pub list: usize,
    pub trials: u64,
    pub seed: u64,
}

/// Seed of the source words used for paired distortion estimates.
pub fn distortion_seed(seed: u64) -> u64 {
    derive_seed(seed, TAG_SOURCE)
}

/// Target distortion `E[q]`, quantizer crossover `p̄₁`, and greedy unfreezing
/// of static indices (most reliable at `p̄₁` first) until the paired mean
/// distortion reaches `E[q]`. The report carries no candidate list.
pub fn design_quantizer(lowrate: &PolarSubcode, d: &QuantizerDesign) -> Result<(NestedCodePair, DesignReport)> {
    let n = lowrate.n();
    let m = log2_len(n)?;
    let expected_q = inverse_star(d.pc_bar, d.p_a)?;
    let p1 = (d.p_bar - d.p_a) / (1.0 - 2.0 * d.p_a);
    let profile1 = density_evolution_minsum(p1, m, DEFAULT_PRUNE_EPS)?;
    let order = unfreeze_order(lowrate, &profile1)?;

    let start = n - lowrate.matrix().count_kind(RowKind::Sfs);
    let source_seed = distortion_seed(d.seed);
    let mut trace = Vec::new();
    let mut chosen = None;
    for free in start..=n {
        let stat = mean_distortion(n, &order[free..], p1, d.list, d.trials, source_seed)?;
        trace.push(DistortionPoint { free, q_bar: stat.q_bar });
        if stat.q_bar <= expected_q {
            chosen = Some(free);
            break;
        }
    }
    let Some(free) = chosen else {
        let best = trace.iter().map(|d| d.q_bar).fold(f64::INFINITY, f64::min);
        return Err(Error::DistortionUnreachable { target: expected_q, best });
    };
    let mut f1 = order[free..].to_vec();
    f1.sort_unstable();
    let pair = stack_nested(&f1, lowrate)?.with_operating_point(d.p_a, Some(p1), Some(d.pc_bar));
    let report = DesignReport {
        p_bar: d.p_bar,
        pc_bar: d.pc_bar,
        expected_q,
        p1,
        m1: pair.m1(),
        m2: pair.m2(),
        candidates: Vec::new(),
        trace,
    };
    Ok((pair, report))
}
