//! Line-oriented text format for nested code pairs.
//!
//! ```text
//! n=256
//! k=64
//! m1=120
//! m2=72
//! pA=0.15
//! design_p=0.22
//! seed=7
//! tA=8
//! tB=56
//! p1=0.1
//! pc=0.19
//! SFS 3 0800...
//! DFS_B 61 ab12...
//! ```
//!
//! `p1` and `pc` are optional. Each row line is `kind pivot hex(coefficients)`
//! with coefficients packed little-endian by index. Rows appear in stacked
//! order, so the first `m1` rows define the quantizer code.

use std::fmt::Write as _;

use super::{ConstraintMatrix, ConstraintRow, NestedCodePair, PolarSubcode, RowKind};
use crate::error::{Error, Result};
use crate::gf2::BitVector;

pub fn write_code_file(pair: &NestedCodePair) -> String {
    let c = pair.c();
    let mut s = String::new();
    let _ = writeln!(s, "n={}", c.n());
    let _ = writeln!(s, "k={}", c.k());
    let _ = writeln!(s, "m1={}", pair.m1());
    let _ = writeln!(s, "m2={}", pair.m2());
    let _ = writeln!(s, "pA={}", pair.p_a);
    let _ = writeln!(s, "design_p={}", c.design_p());
    let _ = writeln!(s, "seed={}", c.seed());
    let _ = writeln!(s, "tA={}", c.t_a());
    let _ = writeln!(s, "tB={}", c.t_b());
    if let Some(p1) = pair.quantizer_p {
        let _ = writeln!(s, "p1={p1}");
    }
    if let Some(pc) = pair.decoder_p {
        let _ = writeln!(s, "pc={pc}");
    }
    for row in c.matrix().rows() {
        let _ = writeln!(s, "{} {} {}", row.kind(), row.pivot(), row.coeffs().to_hex());
    }
    s
}

pub fn read_code_file(text: &str) -> Result<NestedCodePair> {
    let mut header: Vec<(&str, &str, usize)> = Vec::new();
    let mut row_lines = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        if let Some((key, value)) = line.split_once('=') {
            if !row_lines.is_empty() {
                return Err(Error::Parse { line: lineno, msg: "header after rows".into() });
            }
            header.push((key.trim(), value.trim(), lineno));
        } else {
            row_lines.push((line, lineno));
        }
    }
    let get = |key: &str| header.iter().find(|(k, _, _)| *k == key).map(|&(_, v, l)| (v, l));
    fn parse<T: std::str::FromStr>(v: (&str, usize), key: &str) -> Result<T> {
        v.0.parse().map_err(|_| Error::Parse { line: v.1, msg: format!("bad value for {key}: {:?}", v.0) })
    }
    let required = |key: &str| get(key).ok_or(Error::Parse { line: 0, msg: format!("missing header {key}") });

    let n: usize = parse(required("n")?, "n")?;
    let k: usize = parse(required("k")?, "k")?;
    let m1: usize = parse(required("m1")?, "m1")?;
    let m2: usize = parse(required("m2")?, "m2")?;
    let p_a: f64 = parse(required("pA")?, "pA")?;
    let design_p: f64 = parse(required("design_p")?, "design_p")?;
    let seed: u64 = parse(required("seed")?, "seed")?;
    let t_a: usize = parse(required("tA")?, "tA")?;
    let t_b: usize = parse(required("tB")?, "tB")?;
    let p1: Option<f64> = get("p1").map(|v| parse(v, "p1")).transpose()?;
    let pc: Option<f64> = get("pc").map(|v| parse(v, "pc")).transpose()?;

    let mut rows = Vec::with_capacity(row_lines.len());
    for (line, lineno) in row_lines {
        let mut parts = line.split_whitespace();
        let (Some(kind), Some(pivot), Some(hex), None) = (parts.next(), parts.next(), parts.next(), parts.next())
        else {
            return Err(Error::Parse { line: lineno, msg: "expected `kind pivot hex`".into() });
        };
        let wrap = |e: Error| Error::Parse { line: lineno, msg: e.to_string() };
        let kind: RowKind = kind.parse().map_err(wrap)?;
        let pivot: usize =
            pivot.parse().map_err(|_| Error::Parse { line: lineno, msg: format!("bad pivot {pivot:?}") })?;
        let coeffs = BitVector::from_hex(hex, n).map_err(wrap)?;
        rows.push(ConstraintRow::new(pivot, coeffs, kind).map_err(wrap)?);
    }
    if rows.len() != m1 + m2 || n.checked_sub(k) != Some(rows.len()) {
        return Err(Error::Parse {
            line: 0,
            msg: format!("{} rows inconsistent with n={n}, k={k}, m1={m1}, m2={m2}", rows.len()),
        });
    }
    let c = PolarSubcode::new(ConstraintMatrix::new(n, rows)?, design_p, seed)?;
    if c.t_a() != t_a || c.t_b() != t_b {
        return Err(Error::Parse { line: 0, msg: "tA/tB do not match the row kinds".into() });
    }
    Ok(NestedCodePair::from_stacked(c, m1)?.with_operating_point(p_a, p1, pc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codebuild::{build_randomized_psc, stack_nested};
    use crate::reliability::{density_evolution_minsum, DEFAULT_PRUNE_EPS};

    fn sample_pair() -> NestedCodePair {
        let prof = density_evolution_minsum(0.21, 6, DEFAULT_PRUNE_EPS).unwrap();
        let c = build_randomized_psc(64, 12, &prof, 6, 20, 17).unwrap();
        let statics: Vec<usize> =
            c.matrix().rows().iter().filter(|r| r.kind() == RowKind::Sfs).map(|r| r.pivot()).collect();
        stack_nested(&statics[..15], &c).unwrap().with_operating_point(0.15, Some(0.0857142857142857), Some(0.19))
    }

    #[test]
    fn roundtrip_is_byte_identical() {
        let pair = sample_pair();
        let text = write_code_file(&pair);
        let back = read_code_file(&text).unwrap();
        assert_eq!(back, pair);
        assert_eq!(write_code_file(&back), text);
        assert!(text.starts_with("n=64\nk=12\nm1=15\nm2=37\npA=0.15\ndesign_p=0.21\nseed=17\ntA=6\ntB=20\n"));
    }

    #[test]
    fn rejects_corrupt_files() {
        let text = write_code_file(&sample_pair());
        assert!(read_code_file(&text.replace("m1=15", "m1=16")).is_err());
        assert!(read_code_file(&text.replace("n=64\n", "")).is_err());
        let mut lines: Vec<&str> = text.lines().collect();
        let last = lines.pop().unwrap();
        let broken = format!("{}\n{}", lines.join("\n"), last.replace("DFS_A", "SFS"));
        assert!(read_code_file(&broken).is_err());
    }
}
