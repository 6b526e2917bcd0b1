use std::path::Path;
use std::process::{Command, Output};

fn mapc(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mapc"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

#[test]
fn generate_solve_check_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = mapc(&["generate", "--seed", "9", "--aps", "4", "--stas", "12", "--out", "s.json"], d);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    for solver in ["heuristic", "baseline"] {
        let out = mapc(&["solve", "s.json", "--solver", solver, "--metric", "sum-rate", "--out", "r.json"], d);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let report: serde_json::Value = serde_json::from_slice(&std::fs::read(d.join("r.json")).unwrap()).unwrap();
        assert_eq!(report["feasible"], true);
        assert!(report["total_throughput_bps"].as_f64().unwrap() > 0.0);
        std::fs::write(d.join("a.json"), report["allocation"].to_string()).unwrap();
        let out = mapc(&["check", "s.json", "a.json"], d);
        assert_eq!(out.status.code(), Some(0));
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(mapc(&["generate", "--stas", "16", "--out", "big.json"], d).status.success());
    assert_eq!(mapc(&["solve", "big.json", "--solver", "exact"], d).status.code(), Some(2));
    assert_eq!(mapc(&["solve", "missing.json"], d).status.code(), Some(3));
    assert_eq!(mapc(&["generate", "--aps", "4", "--stas", "3"], d).status.code(), Some(1));

    // One STA per AP far past the per-STA cap.
    let over = r#"{"stas":{"0":{"ru":0,"power_mw":40.0},"1":{"ru":null,"power_mw":0.0},"2":{"ru":null,"power_mw":0.0},"3":{"ru":null,"power_mw":0.0},"4":{"ru":null,"power_mw":0.0},"5":{"ru":null,"power_mw":0.0},"6":{"ru":null,"power_mw":0.0},"7":{"ru":null,"power_mw":0.0},"8":{"ru":null,"power_mw":0.0},"9":{"ru":null,"power_mw":0.0},"10":{"ru":null,"power_mw":0.0},"11":{"ru":null,"power_mw":0.0},"12":{"ru":null,"power_mw":0.0},"13":{"ru":null,"power_mw":0.0},"14":{"ru":null,"power_mw":0.0},"15":{"ru":null,"power_mw":0.0}},"grouping":null}"#;
    std::fs::write(d.join("over.json"), over).unwrap();
    let out = mapc(&["check", "big.json", "over.json"], d);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("STA_POWER(6)"));
}

#[test]
fn single_point_sweep_writes_csv_only() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("one.json"), r#"{"points": [10], "instances_per_point": 1, "seed": 3}"#).unwrap();
    let out = mapc(&["sweep", "--config", "one.json", "--out", "res"], d);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(d.join("res/sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(!d.join("res/sweep.svg").exists());
}
