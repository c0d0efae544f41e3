use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn nestpolar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nestpolar")).args(args).output().expect("binary runs")
}

const SMALL_DESIGN: [&str; 22] = [
    "design",
    "--pa",
    "0.05",
    "--n",
    "64",
    "--k",
    "8",
    "--target-pb",
    "0.01",
    "--decoder",
    "scl",
    "--list-size",
    "4",
    "--trials",
    "2000",
    "--quant-trials",
    "200",
    "--ta",
    "2",
    "--tb",
    "8",
    "--seed",
];

fn design(dir: &Path, tag: &str) -> (String, String) {
    let code = dir.join(format!("{tag}.code"));
    let report = dir.join(format!("{tag}.csv"));
    let mut args = SMALL_DESIGN.to_vec();
    args.push("21");
    args.extend(["--code", code.to_str().unwrap(), "--out", report.to_str().unwrap()]);
    let out = nestpolar(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    (fs::read_to_string(code).unwrap(), fs::read_to_string(report).unwrap())
}

#[test]
fn k_above_n_is_a_usage_error() {
    let out = nestpolar(&["design", "--pa", "0.15", "--n", "64", "--k", "65", "--seed", "1", "--code", "/dev/null"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_seed_is_a_usage_error() {
    let out = nestpolar(&["design", "--pa", "0.15", "--n", "64", "--k", "8", "--code", "/dev/null"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn design_is_reproducible_and_feeds_other_commands() {
    let dir = tempfile::tempdir().unwrap();
    let (code_a, report_a) = design(dir.path(), "a");
    let (code_b, report_b) = design(dir.path(), "b");
    assert_eq!(code_a, code_b);
    assert_eq!(report_a, report_b);
    assert!(report_a.contains("# seed=21"));
    let code = dir.path().join("a.code");
    let code = code.to_str().unwrap();

    let zero = nestpolar(&["bler", "--code", code, "--grid", "0.05:0.1:2", "--trials", "0", "--seed", "1"]);
    assert_eq!(zero.status.code(), Some(2));

    let bler = nestpolar(&[
        "bler",
        "--code",
        code,
        "--grid",
        "0.05:0.1:2",
        "--trials",
        "100",
        "--seed",
        "1",
        "--list-size",
        "1,4",
    ]);
    assert!(bler.status.success());
    assert_eq!(String::from_utf8(bler.stdout).unwrap().lines().filter(|l| !l.starts_with('#')).count(), 5);

    let dist = nestpolar(&["distortion", "--code", code, "--trials", "200", "--list-size", "4", "--seed", "21"]);
    assert!(dist.status.success());
    let dist = String::from_utf8(dist.stdout).unwrap();
    let trace: Vec<&str> =
        report_a.lines().filter(|l| l.starts_with("distortion,")).map(|l| l.rsplit(',').next().unwrap()).collect();
    let rerun: Vec<&str> =
        dist.lines().skip(1).filter(|l| !l.starts_with('#')).map(|l| l.split(',').nth(3).unwrap()).collect();
    assert_eq!(trace, rerun);

    let rates = nestpolar(&["rates", "--pa", "0.05", "--code", code]);
    assert!(rates.status.success());
    assert!(String::from_utf8(rates.stdout).unwrap().contains("designed,a,"));
}

#[test]
fn enroll_then_reconstruct_without_noise() {
    let dir = tempfile::tempdir().unwrap();
    design(dir.path(), "c");
    let code = dir.path().join("c.code");
    let record = dir.path().join("r.txt");
    let out = nestpolar(&[
        "enroll",
        "--code",
        code.to_str().unwrap(),
        "--seed",
        "4",
        "--list-size",
        "4",
        "--out",
        record.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&record).unwrap();
    let x = text.lines().find_map(|l| l.strip_prefix("x=")).unwrap();
    let y = dir.path().join("y.hex");
    fs::write(&y, x).unwrap();
    for decoder in ["scl", "seq"] {
        let out = nestpolar(&[
            "reconstruct",
            "--code",
            code.to_str().unwrap(),
            "--record",
            record.to_str().unwrap(),
            "--input",
            y.to_str().unwrap(),
            "--decoder",
            decoder,
            "--list-size",
            "4",
        ]);
        assert!(out.status.success());
        assert!(String::from_utf8(out.stdout).unwrap().contains("match=true"), "{decoder}");
    }
}

#[test]
fn config_file_supplies_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.txt");
    fs::write(&cfg, "pa=0.15\nsteps=3\n").unwrap();
    let out = nestpolar(&["rates", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8(out.stdout).unwrap().contains("# q_steps=3"));
}

#[test]
fn unreadable_code_file_is_a_runtime_failure() {
    let out = nestpolar(&["bler", "--code", "/nonexistent", "--grid", "0.1:0.1:1", "--trials", "1", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(1));
}
