//! `nestpolar`: design, key agreement and experiment front end.
//!
//! Exit status 0 on success, 2 on usage errors, 1 on runtime failures.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use nestpolar::codebuild::{design_nested, read_code_file, write_code_file, DesignParams, NestedCodePair};
use nestpolar::decode::{Decoder, DecoderKind, DEFAULT_QUEUE};
use nestpolar::experiments::{
    bler_table, complexity_table, default_distortion_range, design_table, distortion_table, rates_table,
};
use nestpolar::gf2::BitVector;
use nestpolar::keyagree::{enroll, read_record, reconstruct, write_record};
use nestpolar::sim::stream_rng;

#[derive(Parser)]
#[command(name = "nestpolar", version, about = "Nested polar codes for secret-key agreement")]
struct Cli {
    /// File of `key=value` lines supplying defaults for long flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Design a nested code pair and write its code file and report.
    Design(DesignArgs),
    /// Quantize a source word and emit key and helper data.
    Enroll(EnrollArgs),
    /// Recover the key from a noisy observation and helper data.
    Reconstruct(ReconstructArgs),
    /// Block-error rate of the low-rate code over a crossover grid.
    Bler(BlerArgs),
    /// Quantization distortion against the number of unfrozen indices.
    Distortion(DistortionArgs),
    /// Region boundary, reference points and designed code rates.
    Rates(RatesArgs),
    /// Average decoder and quantizer operation counts.
    Complexity(ComplexityArgs),
}

#[derive(Args)]
struct DecoderArgs {
    /// Reconstruction decoder.
    #[arg(long, default_value = "seq", value_parser = ["scl", "seq"])]
    decoder: String,
    #[arg(long, default_value_t = DEFAULT_QUEUE)]
    queue_size: usize,
}

impl DecoderArgs {
    fn kind(&self, list: usize) -> DecoderKind {
        match self.decoder.as_str() {
            "scl" => DecoderKind::Scl { list },
            _ => DecoderKind::Sequential { list, queue: self.queue_size },
        }
    }
}

#[derive(Args)]
struct DesignArgs {
    #[arg(long)]
    pa: f64,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 1e-3)]
    target_pb: f64,
    #[arg(long, default_value_t = 8)]
    list_size: usize,
    #[command(flatten)]
    dec: DecoderArgs,
    /// BLER trials per crossover; defaults to 30 / target-pb.
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long, default_value_t = 2000)]
    quant_trials: u64,
    /// Quantizer list size; defaults to --list-size.
    #[arg(long)]
    quant_list_size: Option<usize>,
    /// BLER crossover grid `lo:hi:steps`.
    #[arg(long)]
    grid: Option<String>,
    /// Candidate design crossovers `lo:hi:steps`.
    #[arg(long)]
    design_grid: Option<String>,
    #[arg(long)]
    ta: Option<usize>,
    #[arg(long)]
    tb: Option<usize>,
    #[arg(long)]
    seed: u64,
    /// Output code file.
    #[arg(long)]
    code: PathBuf,
    /// Report CSV; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EnrollArgs {
    #[arg(long)]
    code: PathBuf,
    /// Hex source word; a uniform word from --seed when omitted.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 8)]
    list_size: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReconstructArgs {
    #[arg(long)]
    code: PathBuf,
    /// Enrollment record holding the helper data.
    #[arg(long)]
    record: PathBuf,
    /// Hex observation; the recorded source through BSC(pA) from --seed when omitted.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 8)]
    list_size: usize,
    #[command(flatten)]
    dec: DecoderArgs,
    /// Decoder crossover; defaults to the code file's pc.
    #[arg(long)]
    p_eff: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BlerArgs {
    #[arg(long)]
    code: PathBuf,
    /// Crossover grid `lo:hi:steps`.
    #[arg(long)]
    grid: String,
    #[arg(long, value_delimiter = ',', default_value = "8")]
    list_size: Vec<usize>,
    #[command(flatten)]
    dec: DecoderArgs,
    #[arg(long)]
    trials: u64,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DistortionArgs {
    #[arg(long)]
    code: PathBuf,
    /// Grid of n - m1 values `lo:hi:steps`; the design's scan range when omitted.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long, default_value_t = 8)]
    list_size: usize,
    #[arg(long, default_value_t = 2000)]
    trials: u64,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RatesArgs {
    #[arg(long)]
    pa: f64,
    /// Number of boundary points on q in [0, 1/2].
    #[arg(long, default_value_t = 101)]
    steps: usize,
    /// Designed code files to place against the boundary.
    #[arg(long, value_delimiter = ',')]
    code: Vec<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ComplexityArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    code: Vec<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "8,32")]
    list_size: Vec<usize>,
    #[command(flatten)]
    dec: DecoderArgs,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

impl From<nestpolar::Error> for Failure {
    fn from(e: nestpolar::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn usage<T>(msg: impl Into<String>) -> Outcome<T> {
    Err(Failure::Usage(msg.into()))
}

/// Appends `--key value` for every config entry whose flag is absent from
/// `args`, so explicit flags take precedence.
fn apply_config(mut args: Vec<String>) -> Outcome<Vec<String>> {
    let pos = args.iter().position(|a| a == "--config" || a.starts_with("--config="));
    let Some(pos) = pos else { return Ok(args) };
    let path = match args[pos].strip_prefix("--config=") {
        Some(p) => p.to_string(),
        None => match args.get(pos + 1) {
            Some(p) => p.clone(),
            None => return usage("--config requires a path"),
        },
    };
    let text = fs::read_to_string(&path).map_err(|e| Failure::Usage(format!("cannot read config {path}: {e}")))?;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return usage(format!("{path}:{}: expected key=value", i + 1));
        };
        let flag = format!("--{}", key.trim().replace('_', "-"));
        let present = args.iter().any(|a| *a == flag || a.starts_with(&format!("{flag}=")));
        if !present {
            args.push(flag);
            args.push(value.trim().to_string());
        }
    }
    Ok(args)
}

fn parse_grid(spec: &str) -> Outcome<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Failure::Usage(format!("grid {spec:?} is not lo:hi:steps"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].parse().map_err(|_| bad())?;
    let steps: usize = parts[2].parse().map_err(|_| bad())?;
    if steps == 0 || hi < lo || (steps == 1 && hi != lo) {
        return Err(bad());
    }
    if steps == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..steps).map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64).collect())
}

fn parse_index_grid(spec: &str) -> Outcome<Vec<usize>> {
    let mut v: Vec<usize> = parse_grid(spec)?.into_iter().map(|x| x.round().max(0.0) as usize).collect();
    v.dedup();
    Ok(v)
}

fn read_text(path: &Path) -> Outcome<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(Failure::Runtime)
}

fn load_code(path: &Path) -> Outcome<NestedCodePair> {
    let text = read_text(path)?;
    read_code_file(&text).with_context(|| format!("parsing {}", path.display())).map_err(Failure::Runtime)
}

fn read_hex_word(path: &Path, n: usize) -> Outcome<BitVector> {
    let text = read_text(path)?;
    BitVector::from_hex(text.trim(), n).with_context(|| format!("parsing {}", path.display())).map_err(Failure::Runtime)
}

fn emit(out: Option<&Path>, text: &str) -> Outcome<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())).map_err(Failure::Runtime),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn check_positive(name: &str, v: u64) -> Outcome<()> {
    if v == 0 {
        return usage(format!("--{name} must be positive"));
    }
    Ok(())
}

fn check_lists(lists: &[usize]) -> Outcome<()> {
    if lists.is_empty() || lists.contains(&0) {
        return usage("--list-size values must be at least 1");
    }
    Ok(())
}

fn labelled(paths: &[PathBuf]) -> Outcome<Vec<(String, NestedCodePair)>> {
    paths
        .iter()
        .map(|p| {
            let label = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            Ok((label, load_code(p)?))
        })
        .collect()
}

fn run_design(a: DesignArgs) -> Outcome<()> {
    if a.k > a.n {
        return usage(format!("--k {} exceeds --n {}", a.k, a.n));
    }
    let mut params = DesignParams::new(a.pa, a.n, a.k, a.target_pb, a.list_size, a.seed);
    params.decoder = a.dec.kind(a.list_size);
    if let Some(t) = a.trials {
        params.trials = t;
    }
    check_positive("trials", params.trials)?;
    params.quant_trials = a.quant_trials;
    params.quant_list = a.quant_list_size;
    if let Some(g) = &a.grid {
        params.ptilde_grid = parse_grid(g)?;
    }
    if let Some(g) = &a.design_grid {
        params.p_grid = parse_grid(g)?;
    }
    params.t_a = a.ta;
    params.t_b = a.tb;
    if let Err(e) = params.validate() {
        return usage(e.to_string());
    }
    let (pair, report) = design_nested(&params)?;
    emit(Some(&a.code), &write_code_file(&pair))?;
    emit(a.out.as_deref(), &design_table(&params, &report, pair.key_len()).to_string())
}

fn run_enroll(a: EnrollArgs) -> Outcome<()> {
    check_lists(&[a.list_size])?;
    let pair = load_code(&a.code)?;
    let Some(p1) = pair.quantizer_p else {
        return Err(Failure::Runtime(anyhow!("code file carries no quantizer crossover p1")));
    };
    let x = match (&a.input, a.seed) {
        (Some(path), _) => read_hex_word(path, pair.n())?,
        (None, Some(seed)) => BitVector::random(pair.n(), &mut stream_rng(seed, 0)),
        (None, None) => return usage("enroll needs --input or --seed"),
    };
    let record = enroll(&x, &pair, p1, a.list_size)?;
    emit(a.out.as_deref(), &write_record(&record))
}

fn run_reconstruct(a: ReconstructArgs) -> Outcome<()> {
    check_lists(&[a.list_size])?;
    let pair = load_code(&a.code)?;
    let record = read_record(&read_text(&a.record)?, &pair)?;
    let y = match (&a.input, a.seed) {
        (Some(path), _) => read_hex_word(path, pair.n())?,
        (None, Some(seed)) => {
            let noise = BitVector::bernoulli(pair.n(), pair.p_a, &mut stream_rng(seed, 0));
            record.x.xor(&noise)?
        }
        (None, None) => return usage("reconstruct needs --input or --seed"),
    };
    let p_eff = match a.p_eff.or(pair.decoder_p) {
        Some(p) => p,
        None => return usage("--p-eff is required when the code file has no pc"),
    };
    let decoder = Decoder::new(a.dec.kind(a.list_size), pair.n(), p_eff)?;
    let r = reconstruct(&y, &record.helper, &pair, p_eff, &decoder)?;
    let mut s = String::new();
    let _ = writeln!(s, "S_hat={}", r.key.to_hex());
    let _ = writeln!(s, "match={}", r.key == record.key);
    let _ = writeln!(s, "degraded={}", r.degraded);
    let _ = writeln!(s, "sum_count={}", r.outcome.sum_count);
    let _ = writeln!(s, "comp_count={}", r.outcome.comp_count);
    emit(a.out.as_deref(), &s)
}

fn run_bler(a: BlerArgs) -> Outcome<()> {
    check_positive("trials", a.trials)?;
    check_lists(&a.list_size)?;
    let grid = parse_grid(&a.grid)?;
    if grid.iter().any(|&p| !(p > 0.0 && p < 0.5)) {
        return usage("crossover grid must lie in (0, 0.5)");
    }
    let pair = load_code(&a.code)?;
    let t = bler_table(pair.c(), a.dec.kind(1), &a.list_size, &grid, a.trials, a.seed)?;
    emit(a.out.as_deref(), &t.to_string())
}

fn run_distortion(a: DistortionArgs) -> Outcome<()> {
    check_positive("trials", a.trials)?;
    check_lists(&[a.list_size])?;
    let pair = load_code(&a.code)?;
    let frees = match &a.grid {
        Some(g) => parse_index_grid(g)?,
        None => default_distortion_range(&pair),
    };
    if let Some(f) = frees.iter().find(|&&f| f > pair.n()) {
        return usage(format!("n - m1 = {f} exceeds n = {}", pair.n()));
    }
    let t = distortion_table(&pair, &frees, a.list_size, a.trials, a.seed)?;
    emit(a.out.as_deref(), &t.to_string())
}

fn run_rates(a: RatesArgs) -> Outcome<()> {
    if !(a.pa > 0.0 && a.pa < 0.5) {
        return usage("--pa must lie in (0, 0.5)");
    }
    if a.steps < 2 {
        return usage("--steps must be at least 2");
    }
    let pairs = labelled(&a.code)?;
    let t = rates_table(a.pa, a.steps, &pairs)?;
    emit(a.out.as_deref(), &t.to_string())
}

fn run_complexity(a: ComplexityArgs) -> Outcome<()> {
    check_positive("trials", a.trials)?;
    check_lists(&a.list_size)?;
    let pairs = labelled(&a.code)?;
    let t = complexity_table(&pairs, a.dec.kind(1), &a.list_size, a.trials, a.seed)?;
    emit(a.out.as_deref(), &t.to_string())
}

fn run(args: Vec<String>) -> Outcome<()> {
    let args = apply_config(args)?;
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) if e.use_stderr() => return usage(e.to_string()),
        Err(e) => {
            print!("{e}");
            return Ok(());
        }
    };
    match cli.cmd {
        Cmd::Design(a) => run_design(a),
        Cmd::Enroll(a) => run_enroll(a),
        Cmd::Reconstruct(a) => run_reconstruct(a),
        Cmd::Bler(a) => run_bler(a),
        Cmd::Distortion(a) => run_distortion(a),
        Cmd::Rates(a) => run_rates(a),
        Cmd::Complexity(a) => run_complexity(a),
    }
}

fn main() -> ExitCode {
    match run(std::env::args().collect()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {}", msg.trim_end());
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
