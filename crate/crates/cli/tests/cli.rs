use std::process::{Command, Output};

use serde_json::Value;
use tdesign::graph::{Census, OrbitInvariant};
use tdesign::markov::{lambda_q0_bound, mixing_time_bound, q0_structure_check, q1_closed_form, q_empirical, spectral_report, ChainKind, SpectralReport, TransitionMatrix};
use tdesign::sampler::DesignSample;
use tdesign::FieldContext;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tdesign")).args(args).env_remove("TDESIGN_SEED").output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn graph_census_m2() {
    let text = stdout(&["graph-census", "--m", "2"]);
    assert!(text.contains("srg = (15, 6, 1, 3)"));
    let census = Census::from_text(&text).unwrap();
    assert_eq!((census.srg.n, census.srg.t, census.srg.lambda, census.srg.mu), (15, 6, 1, 3));
    assert_eq!(census.edges, 90);
    let json: Value = serde_json::from_str(&stdout(&["graph-census", "--m", "2", "--format", "json"])).unwrap();
    assert_eq!(json["srg"], serde_json::json!([15, 6, 1, 3]));
}

#[test]
fn chain_m3_shows_constant_r() {
    let text = stdout(&["chain", "--m", "3"]);
    assert!(text.contains("R = 8*J(3x6)"), "{text}");
}

#[test]
fn chain_json_round_trip() {
    for m in ["2", "3", "4"] {
        let doc: Value = serde_json::from_str(&stdout(&["chain", "--m", m, "--format", "json"])).unwrap();
        let ctx = FieldContext::new(m.parse().unwrap(), None).unwrap();
        let parse = |key: &str| TransitionMatrix::<OrbitInvariant>::from_json(&doc[key].to_string()).unwrap();
        let q0 = parse("q0_empirical");
        assert!(q0_structure_check(&ctx, &q0).passed());
        assert!(q0.rational_eq(&q_empirical(&ctx, ChainKind::Edges).unwrap()));
        assert!(parse("q1_empirical").rational_eq(&q1_closed_form(&ctx)));
        assert!(parse("q1_closed_form").rational_eq(&q1_closed_form(&ctx)));
    }
}

#[test]
fn chain_csv_round_trip() {
    let ctx = FieldContext::new(3, None).unwrap();
    let csv = stdout(&["chain", "--m", "3", "--format", "csv"]);
    let reference = q_empirical(&ctx, ChainKind::Edges).unwrap();
    let states = reference.states();
    let mut numer = vec![0i64; states.len() * states.len()];
    let mut denom = 0;
    for line in csv.lines().skip(1).filter(|l| l.starts_with("q0_empirical,")) {
        let f: Vec<&str> = line.split(',').collect();
        let i = states.iter().position(|s| s.to_string() == f[1]).unwrap();
        let j = states.iter().position(|s| s.to_string() == f[2]).unwrap();
        numer[i * states.len() + j] = f[3].parse().unwrap();
        denom = f[4].parse().unwrap();
    }
    let parsed = TransitionMatrix::new(states.to_vec(), numer, denom).unwrap();
    assert!(parsed.rational_eq(&reference));
    assert!(q0_structure_check(&ctx, &parsed).passed());
}

#[test]
fn spectra_json_round_trip() {
    let doc: Value = serde_json::from_str(&stdout(&["spectra", "--m", "4"])).unwrap();
    let q0: SpectralReport = serde_json::from_value(doc["q0"].clone()).unwrap();
    assert!(q0.lambda2 < lambda_q0_bound(4));
    let ctx = FieldContext::new(4, None).unwrap();
    let fresh = spectral_report(&q_empirical(&ctx, ChainKind::Edges).unwrap()).unwrap();
    assert_eq!(q0.eigenvalues.len(), fresh.eigenvalues.len());
    for (a, b) in q0.eigenvalues.iter().zip(&fresh.eigenvalues) {
        assert!((a - b).abs() < 1e-12);
    }
    assert_eq!(doc["mixing"]["t_bound"].as_u64(), Some(mixing_time_bound(4, 0.01).unwrap()));
}

#[test]
fn sample_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    let c = dir.path().join("c.jsonl");
    let base = ["sample", "--m", "4", "--epsilon", "0.01", "--seed", "7", "--count", "2", "--out"];
    for path in [&a, &b] {
        let mut args = base.to_vec();
        args.push(path.to_str().unwrap());
        assert!(run(&args).status.success());
    }
    let mut args = base.to_vec();
    args.extend([c.to_str().unwrap(), "--threads", "1"]);
    assert!(run(&args).status.success());
    let bytes = std::fs::read(&a).unwrap();
    assert_eq!(bytes, std::fs::read(&b).unwrap());
    assert_eq!(bytes, std::fs::read(&c).unwrap());
    let ctx = FieldContext::new(4, None).unwrap();
    let text = String::from_utf8(bytes).unwrap();
    let samples: Vec<DesignSample> = text.lines().map(|l| DesignSample::from_json_line(&ctx, l).unwrap()).collect();
    assert_eq!(samples.len(), 2);
    assert_eq!(samples[1].index, 1);
}

#[test]
fn seed_flag_overrides_environment() {
    let with_env = |env: Option<&str>, args: &[&str]| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_tdesign"));
        cmd.args(args).env_remove("TDESIGN_SEED");
        if let Some(v) = env {
            cmd.env("TDESIGN_SEED", v);
        }
        cmd.output().unwrap().stdout
    };
    let base = ["sample", "--m", "2", "--count", "3"];
    let env5 = with_env(Some("5"), &base);
    let flag5 = with_env(None, &[&base[..], &["--seed", "5"]].concat());
    let env9_flag5 = with_env(Some("9"), &[&base[..], &["--seed", "5"]].concat());
    assert_eq!(env5, flag5);
    assert_eq!(env9_flag5, flag5);
    assert_ne!(with_env(None, &base), flag5);
}

#[test]
fn convergence_reaches_target() {
    let csv = stdout(&["convergence", "--m", "3", "--epsilon", "0.1"]);
    let rows: Vec<Vec<String>> = csv.lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect();
    let horizon: usize = rows.iter().map(|r| r[2].parse::<usize>().unwrap()).max().unwrap();
    assert_eq!(horizon, 32);
    for r in rows.iter().filter(|r| r[2] == horizon.to_string()) {
        assert!(r[3].parse::<f64>().unwrap() < 0.1 / 512.0);
    }
}

#[test]
fn field_info_json() {
    let doc: Value = serde_json::from_str(&stdout(&["field-info", "--m", "3", "--format", "json"])).unwrap();
    assert_eq!(doc["polynomial"], "0xb");
    assert_eq!(doc["gram"], serde_json::json!(["100", "001", "010"]));
    let traces: u64 = doc["elements"].as_array().unwrap().iter().map(|e| e["trace"].as_u64().unwrap()).sum();
    assert_eq!(traces, 4);
}

#[test]
fn verify_small_run_passes() {
    let out = run(&["verify", "--m", "2", "--epsilon", "0.05", "--count", "20000", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(doc["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
}

#[test]
fn invalid_arguments_exit_2() {
    assert_eq!(run(&["sample", "--m", "1"]).status.code(), Some(2));
    assert_eq!(run(&["sample", "--epsilon", "0.1", "--steps", "4"]).status.code(), Some(2));
    assert_eq!(run(&["sample", "--format", "csv"]).status.code(), Some(2));
    assert_eq!(run(&["sample", "--epsilon", "1.5"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--m", "4"]).status.code(), Some(2));
    assert_eq!(run(&["chain", "--m", "3", "--poly", "0xf"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn fixed_steps_skip_thresholds() {
    let out = run(&["verify", "--m", "2", "--steps", "0", "--count", "2000"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("PASS psl"), "{text}");
    assert!(text.contains("limit = none"), "{text}");
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn io_failure_exits_1() {
    let out = run(&["field-info", "--out", "/nonexistent-dir/field.txt"]);
    assert_eq!(out.status.code(), Some(1));
}
