use std::path::PathBuf;
use std::process::{Command, Output};

use uniprior_ic::{BoundReport, LinearIndexCode, LowerBoundReport, OracleResult, SingleSolution, VerifyReport};

fn data(name: &str) -> String {
    format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_uniprior-ic")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("uniprior-ic-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn solve_prints_length_and_code() {
    let o = run(&["solve", &data("weighted_five.json")]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("optimal length: 6"), "{text}");
    assert!(text.contains("l* = 9 - 2 - 1 = 6"));
    assert!(text.contains("code (6 symbols)"));

    let o = run(&["--format", "json", "solve", &data("weighted_five.json")]);
    let sol: SingleSolution = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(sol.optimal_length, 6);
    assert_eq!(sol.code.len(), 6);
}

#[test]
fn bound_reports_tightness() {
    let o = run(&["bound", &data("split_cycle.json")]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("lower 4 upper 4"), "{text}");
    assert!(text.contains("tight: yes (DisjointSenders)"));

    let o = run(&["--format", "json", "bound", "--exhaustive", &data("three_cycles.json")]);
    assert_eq!(o.status.code(), Some(0));
    let r: BoundReport = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!((r.lower, r.upper, r.tight), (4, 5, false));
    assert_eq!(r.exhaustive.map(|e| e.bound), Some(4));
}

#[test]
fn tiny_state_cap_is_reported() {
    let o = run(&["bound", "--exhaustive", "--max-states", "1", &data("three_cycles.json")]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("partial"));
}

#[test]
fn verify_flags_undecodable_bits() {
    let o = run(&[
        "verify",
        &data("three_cycles.json"),
        &data("three_cycles_pairwise_minus_one.code.json"),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let text = stdout(&o);
    assert!(text.contains("receiver 3 cannot decode x4[1]"), "{text}");
    assert!(text.contains("receiver 4 cannot decode x3[1]"));

    let o = run(&[
        "--format",
        "json",
        "verify",
        &data("three_cycles.json"),
        &data("three_cycles_triple_xor.code.json"),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let r: VerifyReport = serde_json::from_slice(&o.stdout).unwrap();
    assert!(r.valid);
}

#[test]
fn encoded_codes_verify() {
    for name in ["weighted_five.json", "three_cycles.json", "order_sensitive.json", "semi_triangle.json"] {
        let out = scratch(&format!("{name}.code.json"));
        let o = run(&["encode", &data(name), "-o", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{name}");
        let code = LinearIndexCode::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
        assert!(!code.is_empty());
        let o = run(&["verify", &data(name), out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", stdout(&o));
    }
}

#[test]
fn oracle_and_trace() {
    let o = run(&["oracle", &data("semi_triangle.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("linear optimum = 2"));

    let o = run(&["--format", "json", "oracle", "--max-bits", "2", &data("semi_triangle.json")]);
    assert_eq!(o.status.code(), Some(3));
    let r: OracleResult = serde_json::from_slice(&o.stdout).unwrap();
    assert!(!r.exact);

    let o = run(&["trace", &data("three_cycles.json")]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("AppendDegenerated"), "{text}");
    assert!(text.contains("lower = V_out - (connected + I) = 6 - (0 + 2) = 4"));

    let o = run(&["--format", "json", "trace", &data("three_cycles.json")]);
    let r: LowerBoundReport = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r.bound, 4);
}

#[test]
fn output_is_deterministic() {
    for args in [
        vec!["--format", "json", "bound", "--exhaustive"],
        vec!["--format", "json", "oracle"],
        vec!["trace"],
    ] {
        let mut a = args.clone();
        let path = data("order_sensitive.json");
        a.push(&path);
        assert_eq!(run(&a).stdout, run(&a).stdout);
    }
}

#[test]
fn bad_input_exits_one() {
    assert_eq!(run(&["bogus"]).status.code(), Some(1));
    assert_eq!(run(&["bound", "--max-states", "0", &data("three_cycles.json")]).status.code(), Some(1));
    assert_eq!(run(&["solve", "/nonexistent/file.json"]).status.code(), Some(1));
    assert_eq!(run(&["solve", &data("three_cycles.json")]).status.code(), Some(1));
    assert_eq!(run(&["bound", &data("weighted_five.json")]).status.code(), Some(1));

    let bad = scratch("bad.json");
    std::fs::write(&bad, r#"{"n": 2, "q": [1, 1], "arcs": [[1, 1], [2, 1]], "senders": [[1]]}"#).unwrap();
    let o = run(&["validate", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("violation"));
    assert_eq!(run(&["validate", &data("weighted_five.json")]).status.code(), Some(0));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}
