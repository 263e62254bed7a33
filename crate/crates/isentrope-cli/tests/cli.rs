//! End-to-end runs of the binary: output shape and exit codes.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isentrope"))
        .args(args)
        .env_remove("MODSPACE_CONFIG")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["center", "--q", "5"]).status.code(), Some(1));
    assert_eq!(run(&["entropy"]).status.code(), Some(1));
    assert_eq!(run(&["center", "--q", "4", "--p", "2"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn entropy_routes_agree() {
    let value = |args: &[&str]| -> f64 {
        let o = run(args);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
        v["value"].as_f64().unwrap()
    };
    let root = value(&["entropy", "--root", "7"]);
    let markov = value(&["entropy", "--markov", "7,3"]);
    assert!((root - markov).abs() < 1e-10);
    let covering = value(&["entropy", "--coeffs", "1,0,-2,0,0,1"]);
    assert!((covering - 2f64.ln()).abs() < 1e-9);
}

#[test]
fn verify_passes_for_small_center() {
    let o = run(&["verify", "--q", "5", "--p", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("(d) Period: pass"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn sweep_writes_csv_and_script() {
    let dir = std::env::temp_dir().join(format!("isentrope-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let csv = dir.join("grid.csv");
    let gp = dir.join("grid.gp");
    let o = run(&[
        "sweep", "--sigma1", "-8,-4", "--sigma2", "10,14", "--nx", "3", "--ny", "2",
        "--out", csv.to_str().unwrap(), "--gnuplot", gp.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "sigma1,sigma2,value,error,status");
    assert_eq!(lines.len(), 7);
    assert!(std::fs::read_to_string(&gp).unwrap().contains("grid.csv"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn blaschke_item_failure_exits_two() {
    let o = run(&["blaschke", "--t", "0,0.5", "--p", "1", "--q", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).starts_with("t,multiplier_at_0"));
}

#[test]
fn flags_override_config_file() {
    let dir = std::env::temp_dir().join(format!("isentrope-cfg-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("c.toml");
    std::fs::write(&path, "lap_n_max = 30\n").unwrap();
    let iterations = |extra: &[&str]| -> u64 {
        let o = Command::new(env!("CARGO_BIN_EXE_isentrope"))
            .args(extra)
            .args(["entropy", "--plus", "-6,1"])
            .env("MODSPACE_CONFIG", &path)
            .output()
            .unwrap();
        let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
        v["iterations"].as_u64().unwrap()
    };
    assert_eq!(iterations(&[]), 30);
    assert_eq!(iterations(&["--lap-n-max", "20"]), 20);
    std::fs::write(&path, "no_such_key = 1\n").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_isentrope"))
        .args(["entropy", "--root", "3"])
        .env("MODSPACE_CONFIG", &path)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn centers_table_and_demo() {
    let o = run(&["centers-table", "--q-max", "6"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 1 + 5);
    let o = run(&["demo", "--q", "13", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["p"], 6);
    assert_eq!(v["centers_opposite"], true);
}
