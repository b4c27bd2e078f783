use std::path::PathBuf;
use std::process::{Command, Output};

use stochord::config::parse_config;
use stochord::runner::figure_scenario;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_stochord"));
    c.env_remove("STOCHORD_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn stochord")
}

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

#[test]
fn order_check_exit_codes() {
    let holds = run(&["order-check", "lt", "rician(k=2)", "rician(k=5)"]);
    assert_eq!(holds.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&holds.stdout).contains("holds"));

    let fails = run(&["order-check", "st", "pareto(beta=2)", "pareto(beta=5)"]);
    assert_eq!(fails.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&fails.stdout).contains("counterexample at x ="));

    // equal means; the stronger line of sight is less variable
    let cx = run(&["order-check", "cx", "rician(k=5)", "rician(k=2)"]);
    assert_eq!(cx.status.code(), Some(0));

    let undecided = run(&["order-check", "cx", "pareto(beta=0.8)", "pareto(beta=0.9)"]);
    assert_eq!(undecided.status.code(), Some(4));
}

#[test]
fn invalid_input_exits_two() {
    for args in [
        vec!["avg-metric", "--metric", "nope", "rayleigh"],
        vec!["avg-metric", "--metric", "dpsk", "rician(k=-1)"],
        vec!["capacity", "xx", "rayleigh"],
        vec!["reproduce-figure", "11"],
        vec!["capacity", "erg", "rayleigh", "--grid", "5:1:1"],
        vec!["system-sim", "--topology", "mrc(0)", "rayleigh"],
        vec![],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "command = \"capacity\"\nchannels = [\"rayleigh\"]\ncapacity = \"max\"\n").unwrap();
    let out = run(&["run", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3") && err.contains("capacity"), "{err}");
}

#[test]
fn quadrature_capacity_csv() {
    let out = run(&["capacity", "ci", "nakagami(m=2)", "--grid", "0,10"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "snr_db,estimate,stderr,n_samples\n0.0,0.405465108108,0.0,0\n10.0,1.79175946923,0.0,0\n"
    );
}

#[test]
fn output_file_and_series_column() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let out = run(&[
        "avg-metric",
        "--metric",
        "dpsk",
        "--method",
        "quadrature",
        "rayleigh",
        "nakagami(m=2)",
        "--grid",
        "0",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let series = stochord::csv_io::read_series(text.as_bytes()).unwrap();
    assert_eq!(series.len(), 2);
    assert_eq!(series[0].name, "rayleigh");
    assert!((series[0].result.points[0].estimate - 0.25).abs() < 1e-11);
    // ½(1 + ρ/2)^{-2} at ρ = 1
    assert!((series[1].result.points[0].estimate - 0.5 / 2.25).abs() < 1e-11);
}

#[test]
fn thread_count_does_not_change_output() {
    let args = ["reproduce-figure", "9", "--samples", "40000", "--grid", "-10:30:10"];
    let one = bin().args(args).args(["--threads", "1"]).output().unwrap();
    let four = bin().args(args).args(["--threads", "4"]).output().unwrap();
    assert_eq!(one.status.code(), Some(0));
    assert!(!one.stdout.is_empty());
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn seed_sources_in_precedence_order() {
    let args = ["noise-sim", "--noise", "gaussian", "rayleigh", "--samples", "10000", "--grid", "0"];
    let default = run(&args).stdout;
    let env7 = bin().args(args).env("STOCHORD_SEED", "7").output().unwrap().stdout;
    let flag7 = run(&[&args[..], &["--seed", "7"]].concat()).stdout;
    let env_and_flag = bin()
        .args(args)
        .args(["--seed", "1"])
        .env("STOCHORD_SEED", "7")
        .output()
        .unwrap()
        .stdout;
    assert_ne!(default, env7);
    assert_eq!(env7, flag7);
    assert_eq!(env_and_flag, default);
    let bad = bin().args(args).env("STOCHORD_SEED", "x").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn scenario_files_match_presets() {
    let text = std::fs::read_to_string(scenario("fig5.toml")).unwrap();
    assert_eq!(parse_config(&text).unwrap(), figure_scenario(5).unwrap());

    let text = std::fs::read_to_string(scenario("fig10.toml")).unwrap();
    let s = parse_config(&text).unwrap();
    let preset = figure_scenario(10).unwrap();
    assert_eq!((&s.channels, &s.noise, s.command), (&preset.channels, &preset.noise, preset.command));
}

#[test]
fn scenario_file_runs_with_overrides() {
    let path = scenario("fig5.toml");
    let out = run(&["run", path.to_str().unwrap(), "--samples", "10000", "--grid", "0,10"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let series = stochord::csv_io::read_series(out.stdout.as_slice()).unwrap();
    assert_eq!(series.len(), 2);
    for s in &series {
        assert_eq!(s.result.points.len(), 2);
        assert!(s.result.points.iter().all(|p| p.n_samples == 10_000));
    }
    let via_flag = bin()
        .args(["--config", path.to_str().unwrap(), "--samples", "10000", "--grid", "0,10"])
        .output()
        .unwrap();
    assert_eq!(via_flag.stdout, out.stdout);
}
