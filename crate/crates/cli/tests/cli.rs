use std::path::Path;
use std::process::{Command, Output};

fn mqc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mqc")).args(args).output().unwrap()
}

fn sweep_args<'a>(out: &'a str, extra: &[&'a str]) -> Vec<&'a str> {
    let mut v = vec!["sweep", "--trials", "40", "--seed", "9", "--out", out];
    v.extend_from_slice(extra);
    v
}

fn small_config(dir: &Path) -> String {
    let path = dir.join("small.toml");
    std::fs::write(&path, "[grid]\nn_points = 2001\n\n[experiment]\nn_values = [127, 110, 90, 64, 30, 0]\n").unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn sweep_output_and_trace_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let mut csv = Vec::new();
    let mut traces = Vec::new();
    for run in 0..2 {
        let out = dir.path().join(format!("p{run}.csv"));
        let trace = dir.path().join(format!("t{run}.txt"));
        let (o, t) = (out.to_str().unwrap(), trace.to_str().unwrap());
        let status = mqc(&sweep_args(o, &["--config", &cfg, "--trace", t]));
        assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
        csv.push(std::fs::read(&out).unwrap());
        traces.push(std::fs::read(&trace).unwrap());
        assert!(out.with_extension("meta.toml").exists());
    }
    assert_eq!(csv[0], csv[1]);
    assert_eq!(traces[0], traces[1]);
    assert!(!traces[0].is_empty());
    let text = String::from_utf8(csv[0].clone()).unwrap();
    assert!(text.starts_with("n,t_ns,trials,successes,p_hat,ci_lo,ci_hi\n"));
    assert_eq!(text.lines().count(), 7);
}

#[test]
fn worker_count_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let read = |workers: &str| {
        let out = dir.path().join(format!("w{workers}.csv"));
        let o = out.to_str().unwrap();
        assert!(mqc(&sweep_args(o, &["--config", &cfg, "--workers", workers])).status.success());
        std::fs::read(&out).unwrap()
    };
    assert_eq!(read("1"), read("4"));
}

#[test]
fn timing_and_drain_commands_succeed() {
    let timing = mqc(&["timing"]);
    assert!(timing.status.success());
    let text = String::from_utf8(timing.stdout).unwrap();
    assert!(text.lines().any(|l| l == "100,2800,2800,2.8"));
    assert_eq!(text.lines().count(), 129);

    let drain = mqc(&["drain-test"]);
    assert!(drain.status.success());
    assert!(String::from_utf8(drain.stdout).unwrap().lines().skip(1).all(|l| {
        let (k, p) = l.split_once(',').unwrap();
        k == p
    }));
}

#[test]
fn regime_csv_has_matching_columns() {
    let o = mqc(&["regime", "--csv"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0].split(',').count(), lines[1].split(',').count());
}

#[test]
fn levels_writes_wavefunctions() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let o = mqc(&["levels", "--config", &cfg]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("phi,V,psi0,psi1"));
    // Header plus the interior nodes; the two boundary nodes are fixed at zero.
    assert_eq!(text.lines().count(), 2000);
}

#[test]
fn bad_configuration_exits_with_config_code() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = dir.path().join("unknown.toml");
    std::fs::write(&unknown, "[device]\ninductence = 1e-10\n").unwrap();
    let o = mqc(&["regime", "--config", unknown.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("inductence"));

    let invalid = dir.path().join("invalid.toml");
    std::fs::write(&invalid, "[circuit]\nring_period_ps = 0\n").unwrap();
    assert_eq!(mqc(&["timing", "--config", invalid.to_str().unwrap()]).status.code(), Some(2));

    assert_eq!(mqc(&["regime", "--config", "/nonexistent/cfg.toml"]).status.code(), Some(2));
}
