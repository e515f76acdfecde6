use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_crimedyn");

const TABLE4: &str = "pi = 13820\nmu = 0.0133333\ntheta = 0.09\nepsilon = 0.2\nsigma = 0.6\n\
                      beta = 1.8e-6\nalpha = 2e-6\ngamma = 0.8\np = 0.2\nq = 0.4\n";

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_params(dir: &Path, text: &str) -> String {
    let path = dir.join("params.txt");
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn analyze_succeeds_and_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["analyze", "--preset", "table4", "--out", out]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert!((summary["r0"].as_f64().unwrap() - 1.5107601549667).abs() < 1e-10);
    assert!(dir.path().join("report.txt").exists());
}

#[test]
fn missing_key_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let params = write_params(dir.path(), &TABLE4.replace("gamma = 0.8\n", ""));
    let o = run(&["analyze", "--params", &params, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("gamma"), "{}", stderr(&o));
}

#[test]
fn zero_horizon_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["simulate", "--preset", "table4", "--t-end", "0", "--out", out]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn usage_errors_are_validation_errors() {
    assert_eq!(run(&["analyze", "--seed", "minus-one"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn nonpositive_lambda_is_inadmissible() {
    let dir = tempfile::tempdir().unwrap();
    let params = write_params(dir.path(), &TABLE4.replace("q = 0.4", "q = 5"));
    let o = run(&["analyze", "--params", &params, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn step_budget_exhaustion_is_numerical() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["simulate", "--preset", "table4", "--max-steps", "10", "--out", out]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = dir.path().to_str().unwrap();
        let o = run(&["sweep", "--preset", "table3", "--t-end", "20", "--seed", "3", "--out", out]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let o = run(&["contour", "--preset", "table4", "--sigma-range", "0.1:0.8:6", "--out", out]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    for name in ["sweep.csv", "sweep.json", "contour.csv", "contour.json"] {
        let x = fs::read(a.path().join(name)).unwrap();
        let y = fs::read(b.path().join(name)).unwrap();
        assert!(x == y, "{name} differs between runs");
    }
}

#[test]
fn manifest_is_append_only() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let manifest = dir.path().join("manifest.jsonl");
    run(&["analyze", "--preset", "table3", "--out", out]);
    let first = fs::read_to_string(&manifest).unwrap();
    run(&["analyze", "--preset", "nope", "--out", out]);
    run(&["errata", "--out", out, "--seed", "9"]);
    let all = fs::read_to_string(&manifest).unwrap();
    assert!(all.starts_with(&first));
    let lines: Vec<serde_json::Value> = all.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0]["exit_status"], 0);
    assert_eq!(lines[1]["exit_status"], 2);
    assert_eq!(lines[2]["seed"], 9);
}

#[test]
fn errata_flags_known_discrepancies() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["errata", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let items: Vec<serde_json::Value> =
        serde_json::from_str(&fs::read_to_string(dir.path().join("errata.json")).unwrap()).unwrap();
    let status = |id: &str| {
        items.iter().find(|i| i["id"] == id).unwrap_or_else(|| panic!("{id} missing"))["status"]
            .as_str()
            .unwrap()
            .to_string()
    };
    assert_eq!(status("table3-R0"), "MISMATCH");
    assert_eq!(status("table4-R0"), "PASS");
    assert_eq!(status("fig2-R0c"), "MISMATCH");
    assert_eq!(status("sensitivity-theta"), "PASS");
    assert_eq!(status("sensitivity-q"), "MISMATCH");
    let text = fs::read_to_string(dir.path().join("errata.txt")).unwrap();
    assert!(text.contains("MISMATCH") && text.contains("0.8494"));
}

#[test]
fn preset_without_name_lists_presets() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["preset", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let listing = String::from_utf8_lossy(&o.stdout);
    for name in ["table3", "table4", "fig2", "backward-demo"] {
        assert!(listing.contains(name), "{listing}");
    }
}
