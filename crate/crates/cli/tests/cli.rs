use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_slipflow")).args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn mesh_files_carry_provenance() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["mesh", "--config", s(&configs().join("hamel.json")), "--out", s(dir.path())]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for ext in ["node", "ele", "bnd"] {
        let text = std::fs::read_to_string(dir.path().join(format!("mesh.{ext}"))).unwrap();
        assert!(text.starts_with("# slipflow "), "{ext}");
        assert!(text.lines().next().unwrap().contains("config-sha256 "));
    }
}

#[test]
fn unknown_key_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    let text = std::fs::read_to_string(configs().join("hamel.json")).unwrap().replacen('{', "{\n  \"viscosity\": 1,", 1);
    std::fs::write(&cfg, text).unwrap();
    let out = run(&["audit", "--config", s(&cfg), "--out", s(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("viscosity"));
}

#[test]
fn missing_config_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["audit", "--config", s(&dir.path().join("nope.json")), "--out", s(dir.path())]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bad_pin_is_rejected() {
    let out = run(&["solve", "ns", "--config", s(&configs().join("hamel.json")), "--pin", "one=2"]);
    assert!(!out.status.success());
    let out = run(&["solve", "ns", "--config", s(&configs().join("hamel.json")), "--pin", "5=0", "--out", "/tmp/slipflow-unused"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn pins_enter_the_hash() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("hamel.json");
    let mut hashes = Vec::new();
    for (tag, pin) in [("a", "1=0"), ("b", "1=2*pi")] {
        let o = dir.path().join(tag);
        assert!(run(&["solve", "stokes", "--config", s(&cfg), "--pin", pin, "--out", s(&o)]).status.success());
        let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(o.join("solution.json")).unwrap()).unwrap();
        let c = v["circulations"][1].as_f64().unwrap();
        let want = if tag == "a" { 0.0 } else { 2.0 * std::f64::consts::PI };
        assert!((c - want).abs() < 1e-8, "circulation {c}");
        hashes.push(v["provenance"]["config_sha256"].as_str().unwrap().to_string());
    }
    assert_ne!(hashes[0], hashes[1]);
}

#[test]
fn theorem_one_config_passes_audit() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["audit", "--config", s(&configs().join("theorem1_pass.json")), "--out", s(dir.path())]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("audit.json")).unwrap()).unwrap();
    assert_eq!(v["theorem1"]["verdict"], true);
    assert!(v["theorem1"]["margin"].as_f64().unwrap() >= 0.0);
}
