use std::path::Path;
use std::process::{Command, Output};

const SMALL: &[&str] = &[
    "--grid-points",
    "2048",
    "--domain-length",
    "256",
    "--dt",
    "0.01",
    "--t-final",
    "120",
];

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_soliton-toffoli"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn malformed_config_exits_2_and_names_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[gate]\nvelocty = 0.5\n").unwrap();
    let out = run(&["simulate", "--config", cfg.to_str().unwrap()], &dir.path().join("o"));
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("velocty"), "{stderr}");
}

#[test]
fn invalid_value_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["simulate", "--grid-points", "1023"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("grid.points"));
}

#[test]
fn simulate_without_controls_keeps_target() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["simulate", "--controls", "00", "--target", "1"];
    args.extend_from_slice(SMALL);
    let out = run(&args, dir.path());
    assert!(matches!(out.status.code(), Some(0 | 1)), "{out:?}");
    let summary = json(&dir.path().join("summary.json"));
    assert_eq!(summary["controls"], "00");
    assert_eq!(summary["target_out"], 1);
    assert_eq!(summary["flipped"], false);
    assert!(summary["norm_drift"].as_f64().unwrap() < 1e-10);
    for name in ["spacetime_psi1.csv", "spacetime_psi2.csv", "metadata.json"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
    let meta = json(&dir.path().join("metadata.json"));
    assert_eq!(meta["command"], "simulate");
    assert_eq!(meta["config"]["grid"]["points"], 2048);
}

#[test]
fn rerun_is_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let mut args = vec!["simulate", "--controls", "10", "--t-final", "30"];
    args.extend_from_slice(&SMALL[..6]);
    run(&args, a.path());
    let mut args2 = args.clone();
    args2.extend(["--workers", "2"]);
    run(&args2, b.path());
    for name in ["summary.json", "spacetime_psi1.csv", "spacetime_psi2.csv"] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        let y = std::fs::read(b.path().join(name)).unwrap();
        assert!(x == y, "{name} differs");
    }
}

#[test]
fn truth_table_writes_eight_rows() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["truth-table", "--deterministic-order", "--t-final", "20"];
    args.extend_from_slice(&SMALL[..6]);
    let out = run(&args, dir.path());
    assert!(matches!(out.status.code(), Some(0 | 1)), "{out:?}");
    let csv = std::fs::read_to_string(dir.path().join("truth_table.csv")).unwrap();
    assert_eq!(csv.lines().count(), 9);
    assert!(csv.starts_with("target_in,controls,expected"));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(stdout.lines().count(), 8);
}

#[test]
fn critical_velocity_rejects_bad_bracket() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "[critical]\nbracket = [0.7, 0.3]\n").unwrap();
    let mut args = vec!["critical-velocity", "--config", cfg.to_str().unwrap()];
    args.extend_from_slice(SMALL);
    let out = run(&args, &dir.path().join("o"));
    assert_eq!(out.status.code(), Some(2), "{out:?}");
    assert!(String::from_utf8_lossy(&out.stderr).contains("critical.bracket"));
}
