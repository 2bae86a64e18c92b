//! End-to-end CLI tests: the exit-code contract, report determinism, and
//! the utility subcommands on JSON payloads.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};

fn elladic() -> Command {
    Command::new(env!("CARGO_BIN_EXE_elladic"))
}

fn generate_synthetic(dir: &Path, name: &str, args: &[&str]) -> PathBuf {
    let out = dir.join(name);
    let status = elladic()
        .args(["generate", "synthetic"])
        .args(args)
        .arg("--out")
        .arg(&out)
        .status()
        .expect("spawn elladic");
    assert!(status.success());
    out
}

fn run_stdin(args: &[&str], payload: &str) -> (i32, String) {
    let mut child = elladic()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn elladic");
    child
        .stdin
        .as_mut()
        .unwrap()
        .write_all(payload.as_bytes())
        .unwrap();
    let out = child.wait_with_output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
    )
}

#[test]
fn generate_then_verify_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let tower = generate_synthetic(
        dir.path(),
        "t.json",
        &[
            "--prime",
            "3",
            "--rank",
            "2",
            "--core",
            "1,2,3,4",
            "--horizon",
            "5",
        ],
    );
    // the sidecar appears next to the tower
    assert!(dir.path().join("t.truth.json").exists());
    let status = elladic().arg("verify").arg(&tower).status().unwrap();
    assert_eq!(status.code(), Some(0));
}

#[test]
fn generate_rejects_bad_specs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.json");
    // not a prime
    let status = elladic()
        .args([
            "generate",
            "synthetic",
            "--prime",
            "4",
            "--rank",
            "1",
            "--core",
            "1",
            "--horizon",
            "5",
            "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    // core not a unit
    let status = elladic()
        .args([
            "generate",
            "synthetic",
            "--prime",
            "3",
            "--rank",
            "1",
            "--core",
            "3",
            "--horizon",
            "5",
            "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    // unknown surface
    let status = elladic()
        .args([
            "generate",
            "surface",
            "--surface",
            "klein",
            "--prime",
            "3",
            "--horizon",
            "3",
            "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn verify_exit_codes_cover_the_contract() {
    let dir = tempfile::tempdir().unwrap();
    // exit 0: valid tower
    let tower = generate_synthetic(
        dir.path(),
        "ok.json",
        &[
            "--prime",
            "5",
            "--rank",
            "1",
            "--core",
            "2",
            "--horizon",
            "4",
        ],
    );
    assert_eq!(
        elladic().arg("verify").arg(&tower).status().unwrap().code(),
        Some(0)
    );
    // exit 3: window wider than the horizon leaves nothing testable
    assert_eq!(
        elladic()
            .arg("verify")
            .arg(&tower)
            .args(["--window", "4"])
            .status()
            .unwrap()
            .code(),
        Some(3)
    );
    // exit 1: corrupted gram
    let text = std::fs::read_to_string(&tower).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["levels"][1]["gram"][0][0] = serde_json::Value::String("5".into());
    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, serde_json::to_string(&v).unwrap()).unwrap();
    assert_eq!(
        elladic()
            .arg("verify")
            .arg(&broken)
            .status()
            .unwrap()
            .code(),
        Some(1)
    );
    // exit 2: truncated JSON
    let trunc = dir.path().join("trunc.json");
    std::fs::write(&trunc, &text[..40]).unwrap();
    assert_eq!(
        elladic().arg("verify").arg(&trunc).status().unwrap().code(),
        Some(2)
    );
    // exit 2: missing file
    assert_eq!(
        elladic()
            .arg("verify")
            .arg(dir.path().join("nope.json"))
            .status()
            .unwrap()
            .code(),
        Some(2)
    );
}

#[test]
fn reports_are_deterministic_modulo_wall_clock() {
    let dir = tempfile::tempdir().unwrap();
    let tower = generate_synthetic(
        dir.path(),
        "t.json",
        &[
            "--prime",
            "3",
            "--rank",
            "2",
            "--core",
            "1,1,1,2",
            "--noise",
            "1",
            "--horizon",
            "5",
        ],
    );
    let mut reports = Vec::new();
    for name in ["a.json", "b.json"] {
        let path = dir.path().join(name);
        let status = elladic()
            .arg("verify")
            .arg(&tower)
            .arg("--report")
            .arg(&path)
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
        let mut v: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        for stage in v["stages"].as_array_mut().unwrap() {
            stage["wall_ms"] = serde_json::Value::String("X".into());
        }
        reports.push(serde_json::to_string(&v).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn report_carries_certificate_and_digests() {
    let dir = tempfile::tempdir().unwrap();
    let tower = generate_synthetic(
        dir.path(),
        "t.json",
        &[
            "--prime",
            "2",
            "--rank",
            "1",
            "--core",
            "1",
            "--horizon",
            "4",
        ],
    );
    let report_path = dir.path().join("r.json");
    elladic()
        .arg("verify")
        .arg(&tower)
        .arg("--report")
        .arg(&report_path)
        .status()
        .unwrap();
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(v["format"], 1);
    assert_eq!(v["verdict"], "pass");
    assert!(
        v["certificate"].is_object(),
        "pass verdict must embed a replayable certificate"
    );
    assert_eq!(v["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
    assert!(v["stages"]
        .as_array()
        .unwrap()
        .iter()
        .any(|s| s["name"] == "validate"));
    // the embedded certificate replays through the CLI
    let status = elladic()
        .arg("replay")
        .arg(&report_path)
        .arg(&tower)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
}

#[test]
fn replay_rejects_mismatches() {
    let dir = tempfile::tempdir().unwrap();
    let tower = generate_synthetic(
        dir.path(),
        "t.json",
        &[
            "--prime",
            "3",
            "--rank",
            "1",
            "--core",
            "2",
            "--horizon",
            "4",
        ],
    );
    let report_path = dir.path().join("r.json");
    elladic()
        .arg("verify")
        .arg(&tower)
        .arg("--report")
        .arg(&report_path)
        .status()
        .unwrap();
    // perturb one certificate entry
    let mut v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    v["certificate"]["gram"][0][0] = serde_json::Value::String("7".into());
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, serde_json::to_string(&v).unwrap()).unwrap();
    assert_eq!(
        elladic()
            .arg("replay")
            .arg(&bad)
            .arg(&tower)
            .status()
            .unwrap()
            .code(),
        Some(1)
    );
    // garbage certificate file is malformed, not a mismatch
    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, "{\"format\": 1}").unwrap();
    assert_eq!(
        elladic()
            .arg("replay")
            .arg(&garbage)
            .arg(&tower)
            .status()
            .unwrap()
            .code(),
        Some(2)
    );
}

#[test]
fn util_snf_matches_reference_values() {
    let (code, out) = run_stdin(
        &["util", "snf"],
        r#"{"matrix":[["2","0"],["0","3"]],"mode":"integer"}"#,
    );
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["diagonal"], serde_json::json!(["1", "6"]));
    // local mode normalizes the diagonal to powers of l
    let (code, out) = run_stdin(
        &["util", "snf"],
        r#"{"matrix":[["3","0"],["0","9"]],"mode":{"local":{"prime":"3","level":"2"}}}"#,
    );
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["diagonal"], serde_json::json!(["3", "0"]));
    // schema violation
    let (code, _) = run_stdin(&["util", "snf"], r#"{"matrix":[["2"]],"mode":"euclidean"}"#);
    assert_eq!(code, 2);
}

#[test]
fn util_decompose_and_pairing_check() {
    let (code, out) = run_stdin(
        &["util", "decompose"],
        r#"{"prime":"3","level":"2","presentation":[["3","0"],["0","9"]]}"#,
    );
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["exponents"], serde_json::json!(["2", "1"]));

    let (code, out) = run_stdin(
        &["util", "pairing-check"],
        r#"{"prime":"2","precision":"3","gram":[["0","1"],["-1","0"]]}"#,
    );
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["unimodular"], serde_json::json!(true));

    let (code, out) = run_stdin(
        &["util", "pairing-check"],
        r#"{"prime":"2","precision":"3","gram":[["1","2"],["3","4"]]}"#,
    );
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["unimodular"], serde_json::json!(false));
    assert_eq!(v["divisor_valuations"][0]["valuation"], "0");
    assert_eq!(v["divisor_valuations"][1]["valuation"], "1");
}

#[test]
fn util_dual_partner_contract() {
    let dir = tempfile::tempdir().unwrap();
    let tower = generate_synthetic(
        dir.path(),
        "t.json",
        &[
            "--prime",
            "3",
            "--rank",
            "1",
            "--core",
            "2",
            "--horizon",
            "5",
        ],
    );
    let tower_json = std::fs::read_to_string(&tower).unwrap();
    let payload = format!(r#"{{"tower": {tower_json}, "h": ["1"]}}"#);
    let (code, out) = run_stdin(&["util", "dual-partner"], &payload);
    assert_eq!(code, 0, "{out}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    // e(h, t) = 2t = 1 mod 27 pins t = 14
    assert_eq!(v["t"], serde_json::json!(["14"]));
    assert_eq!(v["pairing_value"], "1");
    // divisible h: exit 1 with a domain error object
    let payload = format!(r#"{{"tower": {tower_json}, "h": ["3"]}}"#);
    let (code, out) = run_stdin(&["util", "dual-partner"], &payload);
    assert_eq!(code, 1);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["error"]["kind"], "divisible");
}

#[test]
fn random_generation_is_reproducible_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for name in ["a.json", "b.json"] {
        let out = dir.path().join(name);
        let status = elladic()
            .args(["generate", "random", "--seed", "42", "--out"])
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success());
        files.push(std::fs::read_to_string(&out).unwrap());
    }
    assert_eq!(files[0], files[1]);
}
