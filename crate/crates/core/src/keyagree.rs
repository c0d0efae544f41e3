//! Enrollment and reconstruction of secret keys from noisy identifier
//! outputs with a nested code pair, a one-time-pad wrapper for chosen
//! secrets, and the key/storage rate region.

use std::fmt::Write as _;

use crate::codebuild::NestedCodePair;
use crate::decode::{channel_llrs, quantize, DecodeOutcome, Decoder};
use crate::error::{Error, Result};
use crate::gf2::{binary_entropy, star, BitVector};

/// Everything produced at enrollment. Only `helper` is public.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnrollmentRecord {
    pub x: BitVector,
    pub x_q: BitVector,
    pub u: BitVector,
    pub key: BitVector,
    pub helper: BitVector,
    pub distortion: usize,
}

/// Helper bits in syndrome form: row `i` of the helper rows evaluated on `u`.
pub fn helper_data(pair: &NestedCodePair, u: &BitVector) -> Result<BitVector> {
    if u.len() != pair.n() {
        return Err(Error::LengthMismatch { left: u.len(), right: pair.n() });
    }
    pair.helper_rows().iter().map(|r| r.evaluate(u)).collect::<Result<Vec<_>>>().map(BitVector::from_bools)
}

/// Quantizes `x` to the quantizer code and derives key and helper data.
pub fn enroll(x: &BitVector, pair: &NestedCodePair, p1: f64, list: usize) -> Result<EnrollmentRecord> {
    if x.len() != pair.n() {
        return Err(Error::LengthMismatch { left: x.len(), right: pair.n() });
    }
    let q = quantize(x, pair, p1, list)?;
    let helper = helper_data(pair, &q.u)?;
    let key = q.u.select(pair.key_indices());
    Ok(EnrollmentRecord { x: x.clone(), x_q: q.x_q, u: q.u, key, helper, distortion: q.distortion })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reconstruction {
    pub key: BitVector,
    pub degraded: bool,
    pub outcome: DecodeOutcome,
}

/// Decodes `y` in the coset of `C` selected by `helper` and returns the key
/// bits. `decoder` should be built for crossover `p_eff`.
pub fn reconstruct(
    y: &BitVector,
    helper: &BitVector,
    pair: &NestedCodePair,
    p_eff: f64,
    decoder: &Decoder,
) -> Result<Reconstruction> {
    if y.len() != pair.n() {
        return Err(Error::LengthMismatch { left: y.len(), right: pair.n() });
    }
    let schedule = pair.reconstruction_schedule(helper)?;
    let outcome = decoder.decode(&channel_llrs(y, p_eff)?, &schedule)?;
    Ok(Reconstruction { key: outcome.u_hat.select(pair.key_indices()), degraded: outcome.degraded, outcome })
}

/// Public data for a chosen secret `S'`: the helper bits plus `S ⊕ S'`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WrappedHelper {
    pub helper: BitVector,
    pub mask: BitVector,
}

pub fn cs_wrap(secret: &BitVector, record: &EnrollmentRecord) -> Result<WrappedHelper> {
    Ok(WrappedHelper { helper: record.helper.clone(), mask: record.key.xor(secret)? })
}

pub fn cs_unwrap(key_hat: &BitVector, mask: &BitVector) -> Result<BitVector> {
    key_hat.xor(mask)
}

/// Rates in bits per symbol.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RatePoint {
    pub r_s: f64,
    pub r_l: f64,
    pub r_w: f64,
    /// Distortion parameter for boundary points.
    pub q: Option<f64>,
    pub p_a: f64,
}

/// Boundary point for distortion `q`:
/// `R_s = 1 − H(q ∗ p_A)`, `R_l = R_w = H(q ∗ p_A) − H(q)`.
pub fn region_boundary(p_a: f64, q: f64) -> Result<RatePoint> {
    for v in [p_a, q] {
        if !(0.0..=0.5).contains(&v) {
            return Err(Error::ProbabilityDomain { value: v, domain: "[0, 0.5]" });
        }
    }
    let h = binary_entropy(star(q, p_a)?)?;
    let r_w = (h - binary_entropy(q)?).max(0.0);
    Ok(RatePoint { r_s: 1.0 - h, r_l: r_w, r_w, q: Some(q), p_a })
}

/// Rates of a designed pair and its key/storage ratio `|K| / m2`.
pub fn code_rate_point(pair: &NestedCodePair) -> Result<(RatePoint, f64)> {
    if pair.m2() == 0 {
        return Err(Error::InvalidParameter("pair has no helper rows".into()));
    }
    let n = pair.n() as f64;
    let (k, m2) = (pair.key_len() as f64, pair.m2() as f64);
    Ok((RatePoint { r_s: k / n, r_l: m2 / n, r_w: m2 / n, q: None, p_a: pair.p_a }, k / m2))
}

/// Audit export: `x=`, `xq=`, `u=`, `S=`, `W=` (hex) and `dist=` lines.
pub fn write_record(record: &EnrollmentRecord) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "x={}", record.x.to_hex());
    let _ = writeln!(s, "xq={}", record.x_q.to_hex());
    let _ = writeln!(s, "u={}", record.u.to_hex());
    let _ = writeln!(s, "S={}", record.key.to_hex());
    let _ = writeln!(s, "W={}", record.helper.to_hex());
    let _ = writeln!(s, "dist={}", record.distortion);
    s
}

/// Parses a record written by [`write_record`] for `pair`.
pub fn read_record(text: &str, pair: &NestedCodePair) -> Result<EnrollmentRecord> {
    let field = |key: &str| -> Result<(usize, &str)> {
        text.lines()
            .enumerate()
            .find_map(|(i, l)| l.strip_prefix(key).and_then(|r| r.strip_prefix('=')).map(|v| (i + 1, v.trim())))
            .ok_or(Error::Parse { line: 0, msg: format!("missing {key}=") })
    };
    let hex = |key: &str, len: usize| -> Result<BitVector> {
        let (line, v) = field(key)?;
        BitVector::from_hex(v, len).map_err(|e| Error::Parse { line, msg: e.to_string() })
    };
    let n = pair.n();
    let (line, dist) = field("dist")?;
    Ok(EnrollmentRecord {
        x: hex("x", n)?,
        x_q: hex("xq", n)?,
        u: hex("u", n)?,
        key: hex("S", pair.key_len())?,
        helper: hex("W", pair.m2())?,
        distortion: dist.parse().map_err(|_| Error::Parse { line, msg: format!("bad distortion {dist:?}") })?,
    })
}
