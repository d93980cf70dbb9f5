//! End-to-end runs of the kdrep binary: exit codes, emitted files, and the
//! documented output rows.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_kdrep"))
}

fn bundled(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fragments")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("read {}: {e}", path.display()))
}

#[test]
fn represent_emits_the_documented_state_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "represent",
        "--input",
        bundled("qubit_zx.json").to_str().unwrap(),
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let states = read(&dir.path().join("states.csv"));
    let mut lines = states.lines();
    assert_eq!(lines.next(), Some("object,i,i_prime,re,im"));
    assert_eq!(lines.next(), Some("state0,0,0,0.5,0.0"));
    assert!(dir.path().join("effects.csv").exists());
    assert!(dir.path().join("channels.csv").exists());
    assert!(dir.path().join("summary.json").exists());
}

#[test]
fn malformed_json_exits_2_and_leaves_no_tables() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("broken.json");
    std::fs::write(&input, "{ this is not json").unwrap();
    let out_dir = dir.path().join("out");
    let out = run(&[
        "represent",
        "--input",
        input.to_str().unwrap(),
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    assert!(!out_dir.join("states.csv").exists());
}

#[test]
fn mislabeled_trace_preserving_channel_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("mislabeled.json");
    // a single Kraus diag(0.9, 1) does not satisfy sum K'K = I
    std::fs::write(
        &input,
        r#"{
  "schema_version": 1,
  "systems": [{ "name": "q", "dim": 2 }],
  "frames": [{
    "name": "zx", "system": "q",
    "basis_a": [[[1.0,0.0],[0.0,0.0]], [[0.0,0.0],[1.0,0.0]]],
    "basis_a_prime": [
      [[0.7071067811865475,0.0],[0.7071067811865475,0.0]],
      [[0.7071067811865475,0.0],[-0.7071067811865475,0.0]]
    ]
  }],
  "channels": [{
    "name": "leaky", "trace_class": "preserving",
    "kraus": [[[[0.9,0.0],[0.0,0.0]],[[0.0,0.0],[1.0,0.0]]]]
  }]
}"#,
    )
    .unwrap();
    let out = run(&[
        "verify",
        "--input",
        input.to_str().unwrap(),
        "--out-dir",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 3);
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.contains("trace-preserving"), "stderr: {err}");
}

#[test]
fn identical_bases_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("samebases.json");
    std::fs::write(
        &input,
        r#"{
  "schema_version": 1,
  "systems": [{ "name": "q", "dim": 2 }],
  "frames": [{
    "name": "zz", "system": "q",
    "basis_a": [[[1.0,0.0],[0.0,0.0]], [[0.0,0.0],[1.0,0.0]]],
    "basis_a_prime": [[[1.0,0.0],[0.0,0.0]], [[0.0,0.0],[1.0,0.0]]]
  }]
}"#,
    )
    .unwrap();
    let out = run(&[
        "represent",
        "--input",
        input.to_str().unwrap(),
        "--out-dir",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 4);
}

#[test]
fn certify_bundled_classical_is_nonnegative() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "certify",
        "--input",
        bundled("classical.json").to_str().unwrap(),
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).starts_with("NONNEGATIVE"));
    let report: serde_json::Value =
        serde_json::from_str(&read(&dir.path().join("certify_report.json"))).unwrap();
    assert_eq!(report["verdict"], "NONNEGATIVE");
    assert_eq!(report["substochasticity"]["performed"], true);
    assert_eq!(report["substochasticity"]["passed"], true);
}

#[test]
fn certify_bundled_ypsilon_is_negative_with_quarter_imaginarity() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "certify",
        "--input",
        bundled("ypsilon.json").to_str().unwrap(),
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 10);
    assert!(stdout(&out).starts_with("NEGATIVE"));
    let report: serde_json::Value =
        serde_json::from_str(&read(&dir.path().join("certify_report.json"))).unwrap();
    let max_abs_imag = report["max_abs_imag"].as_f64().unwrap();
    assert!((max_abs_imag - 0.25).abs() <= 1e-9, "got {max_abs_imag}");
}

#[test]
fn huge_tolerance_dominates_any_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "certify",
        "--input",
        bundled("ypsilon.json").to_str().unwrap(),
        "--tol",
        "1.0",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("NONNEGATIVE"));
}

#[test]
fn verify_random_battery_passes_at_small_trial_counts() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "verify",
        "--random",
        "--suite",
        "all",
        "--seed",
        "7",
        "--trials",
        "20",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).contains("all 11 checks passed"));
}

#[test]
fn verify_exit_code_reflects_failed_checks() {
    // deviations of order machine epsilon fail an absurdly tight tolerance,
    // which must surface as exit 1 (failed checks), not an error code
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "verify",
        "--input",
        bundled("classical.json").to_str().unwrap(),
        "--tol",
        "1e-18",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("FAIL"));
}

#[test]
fn dimension_cap_env_var_rejects_larger_systems() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args([
            "represent",
            "--input",
            bundled("classical.json").to_str().unwrap(),
            "--out-dir",
            dir.path().to_str().unwrap(),
        ])
        .env("KDREP_MAX_DIM", "2")
        .output()
        .unwrap();
    assert_eq!(code(&out), 3);
}

#[test]
fn nonneg_search_witness_reingests_and_certifies() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("diag.json");
    std::fs::write(
        &input,
        r#"{
  "schema_version": 1,
  "systems": [{ "name": "q", "dim": 2 }],
  "states": [{ "name": "mix", "matrix": [[[0.7,0.0],[0.0,0.0]],[[0.0,0.0],[0.3,0.0]]] }],
  "measurements": [{ "name": "z", "effects": [
    [[[1.0,0.0],[0.0,0.0]],[[0.0,0.0],[0.0,0.0]]],
    [[[0.0,0.0],[0.0,0.0]],[[0.0,0.0],[1.0,0.0]]]
  ]}]
}"#,
    )
    .unwrap();
    let out = run(&[
        "search",
        "--mode",
        "nonneg",
        "--input",
        input.to_str().unwrap(),
        "--restarts",
        "8",
        "--max-iters",
        "600",
        "--seed",
        "3",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("witness certifies NONNEGATIVE"));

    let witness = dir.path().join("witness.json");
    let out = run(&[
        "certify",
        "--input",
        witness.to_str().unwrap(),
        "--out-dir",
        dir.path().join("recheck").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).starts_with("NONNEGATIVE"));
}

#[test]
fn extremal_search_prints_the_achieving_state_and_bases() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "search",
        "--mode",
        "min-real",
        "--restarts",
        "10",
        "--max-iters",
        "400",
        "--seed",
        "1",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let value: f64 = text
        .lines()
        .next()
        .unwrap()
        .rsplit(' ')
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!(value <= -0.1249, "best min real entry {value}");
    assert!(text.contains("state ["));
    assert!(text.contains("basis_a[0]"));
    assert!(text.contains("basis_a_prime[1]"));
}

#[test]
fn seeded_commands_rerun_byte_identically() {
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    for dir in [&d1, &d2] {
        let out = run(&[
            "search",
            "--mode",
            "max-imag",
            "--restarts",
            "6",
            "--seed",
            "41",
            "--out-dir",
            dir.path().to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0);
        let out = run(&[
            "verify",
            "--random",
            "--trials",
            "5",
            "--seed",
            "41",
            "--out-dir",
            dir.path().to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0);
    }
    for name in ["search_trace.csv", "verify_checks.csv"] {
        assert_eq!(
            read(&d1.path().join(name)),
            read(&d2.path().join(name)),
            "{name} differs between reruns"
        );
    }
}
