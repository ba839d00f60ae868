use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use phonon_herald::run::ResultTable;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_phonon-herald"))
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn meta(t: &ResultTable, key: &str) -> String {
    t.metadata.iter().find(|(k, _)| k == key).unwrap().1.clone()
}

const SMALL_SWEEP: &str = r#"{
  "sweep": {
    "axes": [ { "name": "beta", "values": [2.0, 4.0] }, { "name": "r", "min": -3.0, "max": 3.0, "points": 13 } ]
  }
}"#;

#[test]
fn validate_succeeds() {
    let o = bin().arg("validate").output().unwrap();
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let t = ResultTable::read_csv(o.stdout.as_slice()).unwrap();
    assert_eq!(t.failed_rows(), 0);
    assert_eq!(meta(&t, "command"), "validate");
}

#[test]
fn config_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{ "sweep": { "axes": [] }, "colour": 1 }"#);
    assert_eq!(code(&bin().args(["sweep-q", "--config"]).arg(&bad).output().unwrap()), 1);
    let axis = write(dir.path(), "axis.json", r#"{ "sweep": { "axes": [ { "name": "kappa", "values": [1.0] } ] } }"#);
    assert_eq!(code(&bin().args(["sweep-q", "--config"]).arg(&axis).output().unwrap()), 1);
    assert_eq!(code(&bin().args(["sweep-q", "--config", "/nonexistent.json"]).output().unwrap()), 1);
    assert_eq!(code(&bin().args(["sweep-q", "--jobs", "0"]).output().unwrap()), 1);
    assert_eq!(code(&bin().args(["sweep-q", "--format", "xml"]).output().unwrap()), 1);
    assert_eq!(code(&bin().arg("frobnicate").output().unwrap()), 1);
    // Protocol without a protocol section.
    assert_eq!(code(&bin().arg("protocol").output().unwrap()), 1);
}

#[test]
fn failed_rows_exit_2_and_still_write_output() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(config("protocol_ideal.json")).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["sweep"]["axes"] = serde_json::json!([{ "name": "g_b", "values": [0.0, 0.01] }]);
    let cfg = write(dir.path(), "zero.json", &v.to_string());
    let out = dir.path().join("out.csv");
    let o = bin().args(["protocol", "--config"]).arg(&cfg).arg("--out").arg(&out).output().unwrap();
    assert_eq!(code(&o), 2);
    let t = ResultTable::read_csv(std::fs::read(&out).unwrap().as_slice()).unwrap();
    assert_eq!(t.rows.len(), 2);
    assert_eq!(t.failed_rows(), 1);
}

#[test]
fn strict_regime_violation_exits_3() {
    // εη⟨n⟩ ≈ 0.54 breaks the click-estimator regime.
    let o = bin().args(["protocol", "--config"]).arg(config("protocol_ideal.json")).output().unwrap();
    assert_eq!(code(&o), 0);
    let o = bin().args(["protocol", "--strict", "--config"]).arg(config("protocol_ideal.json")).output().unwrap();
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("click-estimator"));
}

#[test]
fn csv_output_round_trips_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "s.json", SMALL_SWEEP);
    let out = dir.path().join("s.csv");
    let o = bin().args(["sweep-q", "--config"]).arg(&cfg).arg("--out").arg(&out).output().unwrap();
    assert_eq!(code(&o), 0);
    let bytes = std::fs::read(&out).unwrap();
    let t = ResultTable::read_csv(bytes.as_slice()).unwrap();
    assert_eq!(t.rows.len(), 26);
    assert_eq!(t.to_csv_string().unwrap().into_bytes(), bytes);
    assert!(!bytes.contains(&b'\r'));
}

#[test]
fn hash_ignores_jobs_but_tracks_semantics() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "s.json", SMALL_SWEEP);
    let run = |extra: &[&str]| {
        let o = bin().args(["sweep-q", "--config"]).arg(&cfg).args(extra).output().unwrap();
        assert_eq!(code(&o), 0);
        meta(&ResultTable::read_csv(o.stdout.as_slice()).unwrap(), "config_hash")
    };
    let base = run(&["--jobs", "1"]);
    assert_eq!(base, run(&["--jobs", "4"]));
    assert_ne!(base, run(&["--dim-cap", "50"]));
    assert_ne!(base, run(&["--strict"]));
}

#[test]
fn dim_cap_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "s.json", SMALL_SWEEP);
    let o = bin().args(["sweep-q", "--dim-cap", "60", "--config"]).arg(&cfg).output().unwrap();
    let t = ResultTable::read_csv(o.stdout.as_slice()).unwrap();
    assert_eq!(meta(&t, "dim_cap"), "60");
    // β = 2 needs 51 levels, β = 4 needs 79.
    assert_eq!(t.values("q_numeric").len(), 13);
}

#[test]
fn json_output_and_contour_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "s.json", SMALL_SWEEP);
    let contour = dir.path().join("c.json");
    let o = bin()
        .args(["sweep-q", "--format", "json", "--config"])
        .arg(&cfg)
        .arg("--contour-out")
        .arg(&contour)
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 26);
    let c: serde_json::Value = serde_json::from_slice(&std::fs::read(&contour).unwrap()).unwrap();
    assert_eq!(c["columns"], serde_json::json!(["beta", "r"]));
    assert_eq!(c["rows"].as_array().unwrap().len(), 4);
}

#[test]
fn every_shipped_config_runs() {
    for (cmd, name) in [
        ("sweep-q", "sweep_highdisp.json"),
        ("protocol", "protocol_ideal.json"),
        ("protocol", "protocol_readout.json"),
        ("steady", "steady_cooling.json"),
        ("steady", "steady_five_tone.json"),
    ] {
        let o = bin().arg(cmd).arg("--config").arg(config(name)).output().unwrap();
        assert_eq!(code(&o), 0, "{name}: {}", String::from_utf8_lossy(&o.stderr));
    }
}
