//! End-to-end tests of the scenario runner: exit-code contract, report
//! artifacts, determinism, and the describe subcommand.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qloop"))
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn tmpdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qloop-cli-test-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn t_system_scenario_exits_zero_and_writes_reports() {
    let out = tmpdir("tsys");
    let status = bin()
        .args(["run", "--scenario"])
        .arg(scenario("t-system.json"))
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let report = std::fs::read_to_string(out.join("report.json")).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&report).unwrap();
    assert!(parsed["scenario_hash"].as_str().unwrap().len() == 64);
    assert_eq!(parsed["seed"], 11);
    assert_eq!(parsed["results"].as_array().unwrap().len(), 3);
    let csv = std::fs::read_to_string(out.join("summary.csv")).unwrap();
    assert!(csv.starts_with("name,verdict,notes\n"));
    assert!(csv.contains("t-system-n1,verified"));
}

#[test]
fn even_root_noncommutativity_scenario_passes() {
    let out = tmpdir("even");
    let status = bin()
        .args(["run", "--scenario"])
        .arg(scenario("even-root-noncomm.json"))
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0), "certified absence is the expected verdict");
    let report = std::fs::read_to_string(out.join("report.json")).unwrap();
    assert!(report.contains("certified absence"));
}

#[test]
fn malformed_scenario_exits_two() {
    let out = tmpdir("bad");
    let bad = out.join("broken.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let status = bin()
        .args(["run", "--scenario"])
        .arg(&bad)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn unknown_keys_are_rejected() {
    let out = tmpdir("unknown");
    let bad = out.join("unknown.json");
    std::fs::write(
        &bad,
        r#"{ "context": {"mode": "generic"}, "checks": [], "surprise": 1 }"#,
    )
    .unwrap();
    let status = bin()
        .args(["run", "--scenario"])
        .arg(&bad)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn inconclusive_check_exits_one() {
    let out = tmpdir("inconclusive");
    let path = out.join("shallow.json");
    std::fs::write(
        &path,
        r#"{
  "context": { "mode": "generic", "root_denominator": 1 },
  "checks": [ { "type": "t_q", "m": 0, "z": "1", "truncation": 2 } ]
}"#,
    )
    .unwrap();
    let status = bin()
        .args(["run", "--scenario"])
        .arg(&path)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
}

#[test]
fn reports_are_deterministic_and_jobs_do_not_change_output() {
    let out1 = tmpdir("det1");
    let out2 = tmpdir("det2");
    for (out, jobs) in [(&out1, "1"), (&out2, "3")] {
        let status = bin()
            .args(["run", "--scenario"])
            .arg(scenario("cocycles.json"))
            .arg("--out")
            .arg(out)
            .args(["--jobs", jobs])
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
    }
    let r1 = std::fs::read(out1.join("report.json")).unwrap();
    let r2 = std::fs::read(out2.join("report.json")).unwrap();
    assert_eq!(r1, r2, "reports must be byte-identical across jobs settings");
}

#[test]
fn env_var_overrides_out_flag() {
    let flag_dir = tmpdir("flagdir");
    let env_dir = tmpdir("envdir");
    let status = bin()
        .args(["run", "--scenario"])
        .arg(scenario("t-system.json"))
        .arg("--out")
        .arg(&flag_dir)
        .env("QLOOP_OUT", &env_dir)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(env_dir.join("report.json").exists());
    assert!(!flag_dir.join("report.json").exists());
}

#[test]
fn describe_prints_v2_matrices() {
    let output = bin()
        .args(["describe", r#"{"constructor": "vn", "n": 2}"#])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let text = String::from_utf8(output.stdout).unwrap();
    assert!(text.contains("dim: 3"));
    // the superdiagonal of e+ starts with [2]_q = q + q^-1
    assert!(text.contains("q + q^-1"), "missing [2]_q entry:\n{text}");
    assert!(text.contains("k-eigenvalues"));
}

#[test]
fn describe_xm_and_cyclic() {
    let output = bin()
        .args(["describe", r#"{"constructor": "xm", "m": 4}"#])
        .output()
        .unwrap();
    let text = String::from_utf8(output.stdout).unwrap();
    assert!(text.contains("(0, 4)"), "winding must be printed:\n{text}");

    let output = bin()
        .args([
            "describe",
            r#"{"constructor": "cyclic", "a": "1", "b": "1", "lambda": "2"}"#,
            "--mode",
            "root:6",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let text = String::from_utf8(output.stdout).unwrap();
    assert!(text.contains("dim: 3"));
    assert!(text.contains("relations pass: true"));
}

#[test]
fn describe_bad_spec_exits_two() {
    let output = bin().args(["describe", "{ nope"]).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
}
