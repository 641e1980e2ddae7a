use std::fs;
use std::path::Path;
use std::process::Command;

fn run(args: &[&str], cwd: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_transit-ca"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

#[test]
fn demand_solve_sweep_export_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();

    let out = run(
        &["demand", "gen", "--pattern", "monocentric", "--total", "5000", "--side", "10", "--delta", "1", "--seed", "3", "--out", "od.csv"],
        d,
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(fs::read_to_string(d.join("od.csv")).unwrap().starts_with("# side_length=10\n# cell_size=1\n"));

    let out = run(&["export", "--what", "heatmap", "--in", "od.csv", "--out", "heat.csv"], d);
    assert!(out.status.success());
    assert_eq!(fs::read_to_string(d.join("heat.csv")).unwrap().lines().count(), 101);

    fs::write(
        d.join("scenario.json"),
        r#"{"pattern": "commute", "D": 10000, "mu": 20, "network": "het", "grid": {"side_length": 10, "cell_size": 1}}"#,
    )
    .unwrap();
    for method in ["gp", "cd"] {
        let out = run(&["solve", "--method", method, "--network", "hom", "--scenario", "scenario.json", "--out", method], d);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let design: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join(method).join("design.json")).unwrap()).unwrap();
        assert_eq!(design["kind"], "homogeneous");
        assert_eq!(design["delta_ew"].as_array().unwrap().len(), 1);
    }

    fs::write(
        d.join("sweep.json"),
        r#"{"patterns": ["chessboard1"], "demands": [5000], "vots": [20], "grid": {"side_length": 10, "cell_size": 1}}"#,
    )
    .unwrap();
    let out = run(&["sweep", "--config", "sweep.json", "--out", "sweep", "--jobs", "1"], d);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(fs::read_to_string(d.join("sweep/results.csv")).unwrap().lines().count(), 5);

    let out = run(&["export", "--what", "breakdown", "--in", "sweep/reports.json", "--out", "bd.csv"], d);
    assert!(out.status.success());
    let text = fs::read_to_string(d.join("bd.csv")).unwrap();
    assert!(text.starts_with("pattern,D,vot,network,method,agency_per_pax"));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("s.json"), r#"{"pattern": "uniform", "D": 1000, "mu": 20, "network": "hom", "extra": 1}"#).unwrap();
    let out = run(&["solve", "--method", "gp", "--scenario", "s.json", "--out", "o"], dir.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown field `extra`"));
}
