use std::path::Path;
use std::process::{Command, Output};

use evlab::report::{strip_timing, ReportDocument};
use serde_json::Value;
use tempfile::TempDir;

fn evlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_evlab")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).expect("report written")
}

#[test]
fn gallery_lists_every_operator() {
    let out = evlab(&["gallery"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["dirichlet", "neumann", "periodic", "nonlocal_symmetric", "thermostat", "graph", "odd_order", "delay"] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name} missing");
    }
    let thermostat = text.lines().find(|l| l.starts_with("thermostat")).unwrap();
    assert!(thermostat.contains("antimax holds") && thermostat.contains("thermostat boundary conditions"));

    let doc = json_of(&evlab(&["gallery", "--json"]));
    let ops = doc["details"]["operators"].as_array().unwrap();
    assert_eq!(ops.len(), 8);
    assert_eq!(ops[0]["predicted_antimax"], "fails");
}

#[test]
fn neumann_scan_writes_report_and_csv() {
    let dir = TempDir::new().unwrap();
    let report = dir.path().join("neumann.json");
    let out = evlab(&[
        "scan", "--op", "neumann", "--n", "200", "--mu-min", "-0.5", "--mu-max", "-0.01", "--steps", "50", "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let doc: Value = serde_json::from_str(&read(&report)).unwrap();
    let left = &doc["windows"]["left"];
    assert!(left[0].as_f64().unwrap() < left[1].as_f64().unwrap());
    assert_eq!(doc["records"].as_array().unwrap().len(), 50);

    let csv = read(&report.with_extension("csv"));
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("mu,lower_margin,upper_margin,c_hat,classification"));
    assert_eq!(lines.count(), 50);
}

#[test]
fn dirichlet_scan_has_no_strong_negative_point() {
    let out = evlab(&["scan", "--op", "dirichlet", "--n", "200", "--mu-min", "-15", "--mu-max", "-10", "--json"]);
    assert_eq!(code(&out), 0);
    let doc = json_of(&out);
    assert!(doc["records"].as_array().unwrap().iter().all(|r| r["classification"] != "strong_negative"));
    let antimax = doc["verdicts"].as_array().unwrap().iter().find(|v| v["subject"] == "antimax").unwrap();
    assert_eq!(antimax["computed"], "fails");
    assert_eq!(antimax["predicted"], "fails");
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&evlab(&["scan", "--op", "thermostat", "--param", "beta=0.5"])), 1);
    assert_eq!(code(&evlab(&["scan", "--op", "nosuch"])), 1);
    assert_eq!(code(&evlab(&["scan"])), 1);
    assert_eq!(code(&evlab(&["scan", "--op", "neumann", "--param", "beta"])), 1);
    assert_eq!(code(&evlab(&["scan", "--op", "neumann", "--mu-min", "1", "--mu-max", "0"])), 1);
    assert_eq!(code(&evlab(&["scan", "--op", "graph", "--edges", "0-1:1,2-3:1"])), 1);
    assert_eq!(code(&evlab(&["refine", "--op", "neumann"])), 1);
    assert_eq!(code(&evlab(&["refine", "--op", "neumann", "--probe-mu", "-0.25", "--n-list", "50"])), 1);
    assert_eq!(code(&evlab(&["frobnicate"])), 1);
    assert_eq!(code(&evlab(&["--help"])), 0);
}

#[test]
fn refinement_verdicts() {
    let verdict = |args: &[&str]| {
        let mut full = vec!["refine", "--json"];
        full.extend_from_slice(args);
        let out = evlab(&full);
        assert_eq!(code(&out), 0, "{args:?}");
        json_of(&out)["details"]["verdict"].as_str().unwrap().to_string()
    };
    assert_eq!(verdict(&["--op", "dirichlet", "--probe-mu", "0", "--n-list", "50,100,200,400"]), "divergent");
    assert_eq!(verdict(&["--op", "neumann", "--probe-mu", "-0.25", "--n-list", "50,100,200,400"]), "uniform");
    assert_eq!(verdict(&["--op", "graph", "--edges", "0-1:1,0-2:1.5,0-3:2", "--probe-mu", "-0.05"]), "uniform");
}

#[test]
fn check_suites() {
    assert_eq!(code(&evlab(&["check", "--suite", "core", "--seed", "42"])), 0);
    let out = evlab(&["check", "--suite", "group-positivity", "--json"]);
    assert_eq!(code(&out), 0);
    let doc = json_of(&out);
    let items = doc["details"]["assertions"].as_array().unwrap();
    let one = items.iter().find(|a| a["name"] == "ell=1").unwrap();
    assert_eq!(one["detail"]["cyclic"], false);
    let zero = items.iter().find(|a| a["name"] == "ell=0").unwrap();
    assert!(zero["detail"]["witness"].is_null() && zero["detail"]["cyclic"].is_null());
    assert_eq!(code(&evlab(&["check", "--suite", "characterization"])), 0);
    assert_eq!(code(&evlab(&["check", "--suite", "nosuch"])), 1);
}

#[test]
fn oracles() {
    let out = evlab(&["oracle", "--name", "dirichlet_green", "--n-list", "50,100,200", "--json"]);
    assert_eq!(code(&out), 0);
    let p = json_of(&out)["details"]["observed_order"].as_f64().unwrap();
    assert!((p - 2.0).abs() < 0.05, "{p}");

    let out = evlab(&["oracle", "--name", "periodic_first_order", "--n", "127", "--mu", "1.0", "--json"]);
    assert_eq!(code(&out), 0);
    assert!(json_of(&out)["details"]["error"].as_f64().unwrap() <= 1e-6);

    let out = evlab(&["oracle", "--name", "neumann_constant", "--op", "delay", "--mu", "0.5", "--json"]);
    assert_eq!(code(&out), 0);
    assert!(json_of(&out)["details"]["error"].as_f64().unwrap() <= 1e-8);

    assert_eq!(code(&evlab(&["oracle", "--name", "dirichlet_green", "--op", "neumann"])), 1);
    assert_eq!(code(&evlab(&["oracle", "--name", "neumann_constant", "--op", "dirichlet", "--mu", "1"])), 1);
    assert_eq!(code(&evlab(&["oracle", "--name", "nosuch"])), 1);
}

#[test]
fn delay_left_eigenvector_oracle_reports_first_order() {
    let out = evlab(&["oracle", "--name", "delay_left_eigenvector", "--json"]);
    assert_eq!(code(&out), 3);
    let p = json_of(&out)["details"]["observed_order"].as_f64().unwrap();
    assert!((0.9..1.2).contains(&p), "{p}");
}

#[test]
fn report_round_trips() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("r.json");
    assert_eq!(code(&evlab(&["scan", "--op", "odd_order", "--param", "ell=1", "--out", path.to_str().unwrap()])), 0);
    let text = read(&path);
    let doc: ReportDocument = serde_json::from_str(&text).unwrap();
    assert_eq!(doc.to_json().unwrap(), text);
}

#[test]
fn repeated_runs_agree_modulo_timing() {
    let dir = TempDir::new().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let out = evlab(&["scan", "--op", "thermostat", "--param", "beta=0.2", "--out", path.to_str().unwrap()]);
        assert_eq!(code(&out), 0);
        read(&path)
    };
    let (a, b) = (run("a.json"), run("b.json"));
    assert_eq!(strip_timing(&a), strip_timing(&b));
    assert!(strip_timing(&a).len() < a.len());
}

#[test]
fn unwritable_output_leaves_nothing_behind() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("missing").join("r.json");
    let out = evlab(&["scan", "--op", "neumann", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(!path.exists());
}
