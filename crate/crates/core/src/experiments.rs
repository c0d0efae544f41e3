//! Experiment drivers producing deterministic CSV tables.
//!
//! Every table ends with `# key=value` lines echoing the configuration, so a
//! file reproduces itself when the same values are passed again.

use std::fmt;

use crate::codebuild::{
    distortion_seed, mean_distortion, simulate_bler, unfreeze_order, DesignParams, DesignReport, NestedCodePair,
    PolarSubcode, RowKind,
};
use crate::decode::DecoderKind;
use crate::error::{Error, Result};
use crate::gf2::{binary_entropy, log2_len};
use crate::keyagree::{code_rate_point, region_boundary};
use crate::reliability::{density_evolution_minsum, DEFAULT_PRUNE_EPS};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub config: Vec<(String, String)>,
}

impl CsvTable {
    fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|h| h.to_string()).collect(), ..Self::default() }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn set(&mut self, key: &str, value: impl fmt::Display) {
        self.config.push((key.to_string(), value.to_string()));
    }

    /// Index of a header column.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Values of a numeric column; empty cells are skipped.
    pub fn numeric_column(&self, name: &str) -> Vec<f64> {
        let Some(c) = self.column(name) else { return Vec::new() };
        self.rows.iter().filter_map(|r| r[c].parse().ok()).collect()
    }
}

impl fmt::Display for CsvTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.header.join(","))?;
        for row in &self.rows {
            writeln!(f, "{}", row.join(","))?;
        }
        for (k, v) in &self.config {
            writeln!(f, "# {k}={v}")?;
        }
        Ok(())
    }
}

fn cell(v: impl fmt::Display) -> String {
    v.to_string()
}

fn opt_cell(v: Option<impl fmt::Display>) -> String {
    v.map(cell).unwrap_or_default()
}

fn join<T: fmt::Display>(values: &[T]) -> String {
    values.iter().map(cell).collect::<Vec<_>>().join(" ")
}

fn decoder_config(t: &mut CsvTable, decoder: DecoderKind) {
    t.set("decoder", decoder);
    if let DecoderKind::Sequential { queue, .. } = decoder {
        t.set("queue_size", queue);
    }
}

/// Report of a design run: one `bler` row per measured point, one `pc` row
/// per candidate, one `distortion` row per scanned quantizer size, and
/// `summary` rows for the selected operating point.
pub fn design_table(params: &DesignParams, report: &DesignReport, key_len: usize) -> CsvTable {
    let mut t = CsvTable::new(&["record", "design_p", "p_tilde", "n_minus_m1", "trials", "errors", "value"]);
    for c in &report.candidates {
        for b in &c.search.points {
            t.push(vec![
                "bler".into(),
                cell(c.design_p),
                cell(b.p),
                String::new(),
                cell(b.tally.trials),
                cell(b.tally.errors),
                cell(b.tally.rate()),
            ]);
        }
        t.push(vec![
            "pc".into(),
            cell(c.design_p),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            opt_cell(c.search.pc),
        ]);
    }
    for d in &report.trace {
        t.push(vec![
            "distortion".into(),
            String::new(),
            String::new(),
            cell(d.free),
            cell(params.quant_trials),
            String::new(),
            cell(d.q_bar),
        ]);
    }
    let summary: [(&str, String); 7] = [
        ("p_bar", cell(report.p_bar)),
        ("pc_bar", cell(report.pc_bar)),
        ("expected_q", cell(report.expected_q)),
        ("p1", cell(report.p1)),
        ("m1", cell(report.m1)),
        ("m2", cell(report.m2)),
        ("key_len", cell(key_len)),
    ];
    for (name, v) in summary {
        let mut row = vec![String::new(); 7];
        row[0] = format!("summary:{name}");
        row[6] = v;
        t.push(row);
    }
    t.set("command", "design");
    t.set("pa", params.p_a);
    t.set("n", params.n);
    t.set("k", params.k);
    t.set("target_pb", params.target_pb);
    decoder_config(&mut t, params.decoder);
    t.set("list_size", params.decoder.list());
    t.set("quant_list_size", params.quantizer_list());
    t.set("trials", params.trials);
    t.set("quant_trials", params.quant_trials);
    t.set("p_grid", join(&params.p_grid));
    t.set("ptilde_grid", join(&params.ptilde_grid));
    t.set("tA", opt_cell(params.t_a));
    t.set("tB", opt_cell(params.t_b));
    t.set("seed", params.seed);
    t
}

/// BLER of `code` on each crossover in `grid` for each list size. All points
/// share one seed, so curves for different list sizes are paired.
pub fn bler_table(
    code: &PolarSubcode,
    decoder: DecoderKind,
    lists: &[usize],
    grid: &[f64],
    trials: u64,
    seed: u64,
) -> Result<CsvTable> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    if lists.is_empty() || grid.is_empty() {
        return Err(Error::InvalidParameter("list sizes and grid must be non-empty".into()));
    }
    let mut t = CsvTable::new(&[
        "list_size",
        "p_tilde",
        "trials",
        "errors",
        "bler",
        "ci_low",
        "ci_high",
        "sum_count_avg",
        "comp_count_avg",
        "degraded",
    ]);
    for &list in lists {
        for &p in grid {
            let tally = simulate_bler(code, decoder.with_list(list), p, trials, seed)?;
            let (lo, hi) = tally.interval();
            t.push(vec![
                cell(list),
                cell(p),
                cell(tally.trials),
                cell(tally.errors),
                cell(tally.rate()),
                cell(lo),
                cell(hi),
                cell(tally.mean_sum_ops()),
                cell(tally.mean_comp_ops()),
                cell(tally.degraded),
            ]);
        }
    }
    t.set("command", "bler");
    t.set("n", code.n());
    t.set("k", code.k());
    t.set("design_p", code.design_p());
    t.set("code_seed", code.seed());
    decoder_config(&mut t, decoder);
    t.set("list_size", join(lists));
    t.set("grid", join(grid));
    t.set("trials", trials);
    t.set("seed", seed);
    Ok(t)
}

/// Quantizer sizes scanned by default: from the quantizer with every static
/// index of `C` frozen up to the pair's own `n − m1`.
pub fn default_distortion_range(pair: &NestedCodePair) -> Vec<usize> {
    let n = pair.n();
    let start = n - pair.c().matrix().count_kind(RowKind::Sfs);
    (start..=n - pair.m1()).collect()
}

/// Mean distortion of the quantizer with `free` unfrozen indices, following
/// the design's unfreezing order at the pair's quantizer crossover. Source
/// words derive from `seed` exactly as in the design, so the same seed
/// reproduces its trace.
pub fn distortion_table(
    pair: &NestedCodePair,
    frees: &[usize],
    list: usize,
    trials: u64,
    seed: u64,
) -> Result<CsvTable> {
    let p1 = pair
        .quantizer_p
        .ok_or_else(|| Error::InvalidParameter("code file carries no quantizer crossover p1".into()))?;
    let n = pair.n();
    if let Some(&f) = frees.iter().find(|&&f| f > n) {
        return Err(Error::InvalidParameter(format!("n - m1 = {f} exceeds n = {n}")));
    }
    let profile = density_evolution_minsum(p1, log2_len(n)?, DEFAULT_PRUNE_EPS)?;
    let order = unfreeze_order(pair.c(), &profile)?;
    let mut t = CsvTable::new(&["n_minus_m1", "m1", "trials", "q_bar", "sum_count_avg", "comp_count_avg"]);
    for &free in frees {
        let stat = mean_distortion(n, &order[free..], p1, list, trials, distortion_seed(seed))?;
        t.push(vec![
            cell(free),
            cell(n - free),
            cell(trials),
            cell(stat.q_bar),
            cell(stat.ops.sums as f64 / trials as f64),
            cell(stat.ops.comps as f64 / trials as f64),
        ]);
    }
    t.set("command", "distortion");
    t.set("n", n);
    t.set("p1", p1);
    t.set("list_size", list);
    t.set("grid", join(frees));
    t.set("trials", trials);
    t.set("seed", seed);
    Ok(t)
}

/// Largest key rate on the region boundary at storage rate `r_w`.
/// `R_w(q)` decreases from `H(p_A)` at `q = 0` to zero at `q = 1/2`.
pub fn max_key_rate(p_a: f64, r_w: f64) -> Result<f64> {
    let at = |q: f64| region_boundary(p_a, q);
    if r_w >= at(0.0)?.r_w {
        return Ok(at(0.0)?.r_s);
    }
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if at(mid)?.r_w > r_w {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(at(hi)?.r_s)
}

/// Published reference operating points: `(label, n, key_len, m2)`.
pub const REFERENCE_POINTS: [(&str, usize, usize, usize); 6] = [
    ("code1", 1024, 128, 553),
    ("code1", 1024, 128, 492),
    ("code1", 1024, 128, 474),
    ("code2", 2048, 128, 578),
    ("code2", 2048, 128, 505),
    ("code2", 2048, 128, 490),
];

/// Region boundary on `q_steps` evenly spaced distortions in `[0, 1/2]`,
/// reference points, and designed pairs with their achievability margin.
pub fn rates_table(p_a: f64, q_steps: usize, pairs: &[(String, NestedCodePair)]) -> Result<CsvTable> {
    if q_steps < 2 {
        return Err(Error::InvalidParameter("at least two boundary points required".into()));
    }
    let mut t = CsvTable::new(&[
        "source",
        "label",
        "q",
        "r_s_bits_per_symbol",
        "r_w_bits_per_symbol",
        "key_storage_ratio",
        "max_r_s_at_r_w",
        "achievable",
    ]);
    for i in 0..q_steps {
        let q = 0.5 * i as f64 / (q_steps - 1) as f64;
        let b = region_boundary(p_a, q)?;
        let ratio = if b.r_w > 0.0 { cell(b.r_s / b.r_w) } else { String::new() };
        t.push(vec![
            "boundary".into(),
            String::new(),
            cell(q),
            cell(b.r_s),
            cell(b.r_w),
            ratio,
            cell(b.r_s),
            "true".into(),
        ]);
    }
    let mut point = |source: &str, label: &str, r_s: f64, r_w: f64| -> Result<()> {
        let bound = max_key_rate(p_a, r_w)?;
        t.push(vec![
            source.into(),
            label.into(),
            String::new(),
            cell(r_s),
            cell(r_w),
            cell(r_s / r_w),
            cell(bound),
            cell(r_s <= bound),
        ]);
        Ok(())
    };
    for (label, n, key, m2) in REFERENCE_POINTS {
        point("reference", &format!("{label}_m2_{m2}"), key as f64 / n as f64, m2 as f64 / n as f64)?;
    }
    for (label, pair) in pairs {
        let (rp, _) = code_rate_point(pair)?;
        point("designed", label, rp.r_s, rp.r_w)?;
    }
    t.set("command", "rates");
    t.set("pa", p_a);
    t.set("q_steps", q_steps);
    t.set("h_pa", binary_entropy(p_a)?);
    t.set("codes", pairs.iter().map(|(l, _)| l.as_str()).collect::<Vec<_>>().join(" "));
    Ok(t)
}

/// Average operation counts of the reconstruction decoder on `C` at the
/// pair's decoding crossover and of the list quantizer on `C1` at its design
/// crossover, per list size.
pub fn complexity_table(
    pairs: &[(String, NestedCodePair)],
    decoder: DecoderKind,
    lists: &[usize],
    trials: u64,
    seed: u64,
) -> Result<CsvTable> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    let mut t = CsvTable::new(&[
        "label",
        "n",
        "role",
        "decoder",
        "list_size",
        "rate",
        "trials",
        "sum_count_avg",
        "comp_count_avg",
    ]);
    for (label, pair) in pairs {
        let n = pair.n();
        let (pc, p1) = match (pair.decoder_p, pair.quantizer_p) {
            (Some(pc), Some(p1)) => (pc, p1),
            _ => return Err(Error::InvalidParameter(format!("{label}: code file lacks p1 or pc"))),
        };
        let f1 = pair.f1();
        for &list in lists {
            let kind = decoder.with_list(list);
            let tally = simulate_bler(pair.c(), kind, pc, trials, seed)?;
            t.push(vec![
                label.clone(),
                cell(n),
                "decoder".into(),
                cell(kind),
                cell(list),
                cell(pair.c().k() as f64 / n as f64),
                cell(trials),
                cell(tally.mean_sum_ops()),
                cell(tally.mean_comp_ops()),
            ]);
            let stat = mean_distortion(n, &f1, p1, list, trials, distortion_seed(seed))?;
            t.push(vec![
                label.clone(),
                cell(n),
                "quantizer".into(),
                "scl".into(),
                cell(list),
                cell((n - pair.m1()) as f64 / n as f64),
                cell(trials),
                cell(stat.ops.sums as f64 / trials as f64),
                cell(stat.ops.comps as f64 / trials as f64),
            ]);
        }
    }
    t.set("command", "complexity");
    t.set("codes", pairs.iter().map(|(l, _)| l.as_str()).collect::<Vec<_>>().join(" "));
    decoder_config(&mut t, decoder);
    t.set("list_size", join(lists));
    t.set("trials", trials);
    t.set("seed", seed);
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codebuild::{build_randomized_psc, design_nested, stack_nested};
    use crate::reliability::density_evolution_minsum;

    fn small_pair() -> NestedCodePair {
        let prof = density_evolution_minsum(0.2, 4, DEFAULT_PRUNE_EPS).unwrap();
        let c = build_randomized_psc(16, 4, &prof, 2, 3, 5).unwrap();
        let statics: Vec<usize> =
            c.matrix().rows().iter().filter(|r| r.kind() == RowKind::Sfs).map(|r| r.pivot()).collect();
        stack_nested(&statics[..4], &c).unwrap().with_operating_point(0.1, Some(0.2), Some(0.2))
    }

    #[test]
    fn display_has_header_rows_and_footer() {
        let mut t = CsvTable::new(&["a", "b"]);
        t.push(vec!["1".into(), "0.5".into()]);
        t.set("seed", 3);
        assert_eq!(t.to_string(), "a,b\n1,0.5\n# seed=3\n");
        assert_eq!(t.numeric_column("b"), vec![0.5]);
    }

    #[test]
    fn max_key_rate_matches_boundary_points() {
        for q in [0.0, 0.05, 0.2, 0.4] {
            let b = region_boundary(0.15, q).unwrap();
            assert!((max_key_rate(0.15, b.r_w).unwrap() - b.r_s).abs() < 1e-9, "q={q}");
        }
        // Storage beyond H(p_A) cannot raise the key rate further.
        let cap = region_boundary(0.15, 0.0).unwrap().r_s;
        assert_eq!(max_key_rate(0.15, 0.9).unwrap(), cap);
    }

    #[test]
    fn reference_points_lie_below_the_boundary() {
        let t = rates_table(0.15, 11, &[]).unwrap();
        let src = t.column("source").unwrap();
        let ok = t.column("achievable").unwrap();
        let refs: Vec<_> = t.rows.iter().filter(|r| r[src] == "reference").collect();
        assert_eq!(refs.len(), 6);
        assert!(refs.iter().all(|r| r[ok] == "true"));
        assert_eq!(t.rows.len(), 17);
    }

    #[test]
    fn bler_table_is_deterministic_and_rejects_zero_trials() {
        let pair = small_pair();
        let kind = DecoderKind::Scl { list: 1 };
        let a = bler_table(pair.c(), kind, &[1, 4], &[0.05, 0.1], 200, 9).unwrap();
        let b = bler_table(pair.c(), kind, &[1, 4], &[0.05, 0.1], 200, 9).unwrap();
        assert_eq!(a.to_string(), b.to_string());
        assert_eq!(a.rows.len(), 4);
        assert!(bler_table(pair.c(), kind, &[1], &[0.1], 0, 9).is_err());
    }

    #[test]
    fn distortion_endpoints() {
        let pair = small_pair();
        let t = distortion_table(&pair, &[0, 16], 4, 400, 1).unwrap();
        let q = t.numeric_column("q_bar");
        assert!((q[0] - 0.5).abs() < 0.05, "all frozen gives {}", q[0]);
        assert_eq!(q[1], 0.0);
        assert!(distortion_table(&pair, &[17], 4, 10, 1).is_err());
    }

    #[test]
    fn distortion_reproduces_design_trace() {
        let mut params = DesignParams::new(0.05, 64, 8, 1e-2, 4, 11);
        params.decoder = DecoderKind::Scl { list: 4 };
        params.trials = 2000;
        params.quant_trials = 200;
        params.t_a = Some(2);
        params.t_b = Some(8);
        let (pair, report) = design_nested(&params).unwrap();
        let frees: Vec<usize> = report.trace.iter().map(|d| d.free).collect();
        assert_eq!(frees, default_distortion_range(&pair));
        let t = distortion_table(&pair, &frees, 4, 200, 11).unwrap();
        let expect: Vec<f64> = report.trace.iter().map(|d| d.q_bar).collect();
        assert_eq!(t.numeric_column("q_bar"), expect);
        let d = design_table(&params, &report, pair.key_len());
        assert!(d.to_string().contains("summary:m2,,,,,,"));
    }

    #[test]
    fn complexity_rows_per_list() {
        let pair = small_pair();
        let t = complexity_table(&[("a".into(), pair)], DecoderKind::Sequential { list: 1, queue: 64 }, &[1, 4], 50, 2)
            .unwrap();
        assert_eq!(t.rows.len(), 4);
        assert!(t.numeric_column("sum_count_avg").iter().all(|&s| s > 0.0));
    }
}
