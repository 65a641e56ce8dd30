use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hybridtele")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn json(out: &Output) -> Value {
    assert_eq!(code(out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("sweep.json");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn help_and_usage_errors() {
    assert_eq!(code(&cli(&["--help"])), 0);
    assert_eq!(code(&cli(&["fidelity", "--help"])), 0);
    assert_eq!(code(&cli(&[])), 1);
    assert_eq!(code(&cli(&["fidelity", "--family", "hqC", "--r", "1"])), 1);
    assert_eq!(code(&cli(&["fidelity", "--family", "spq", "--r", "1", "--p", "0.5"])), 1);
    assert_eq!(code(&cli(&["fidelity", "--family", "spq", "--r", "-1"])), 1);
    assert_eq!(code(&cli(&["figure", "--id", "6"])), 1);
}

#[test]
fn fidelity_record_schema() {
    let v = json(&cli(&["fidelity", "--family", "spq", "--r", "0"]));
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    for key in [
        "family",
        "alpha",
        "r",
        "loss",
        "delta",
        "p",
        "phi",
        "averaged",
        "fidelity",
        "raw_fidelity",
        "method",
        "variant",
        "error_estimate",
        "status",
    ] {
        assert!(keys.contains(&key), "missing {key}");
    }
    assert!((v["fidelity"].as_f64().unwrap() - 0.125).abs() < 1e-14);
    assert_eq!(v["averaged"], true);
    assert_eq!(v["alpha"], Value::Null);
    assert_eq!(v["status"], "ok");
}

#[test]
fn closed_variants_and_unsupported_requests() {
    let args = ["fidelity", "--family", "hqA", "--alpha", "1", "--r", "1", "--method", "closed"];
    let printed = json(&cli(&args));
    let corrected = json(&cli(&[&args[..], &["--variant", "corrected"]].concat()));
    let quad = json(&cli(&args[..7]));
    assert_eq!(printed["variant"], "printed");
    let (p, c, q) = (printed["fidelity"].as_f64().unwrap(), corrected["fidelity"].as_f64().unwrap(), quad["fidelity"].as_f64().unwrap());
    assert!((c - q).abs() < 1e-8 && (p - q).abs() > 1e-2);

    assert_eq!(code(&cli(&["fidelity", "--family", "coherent", "--alpha", "0.5", "--r", "1", "--method", "closed"])), 1);
    assert_eq!(code(&cli(&["fidelity", "--family", "spq", "--r", "1", "--method", "mc"])), 1);
}

#[test]
fn monte_carlo_is_seeded() {
    let args = [
        "fidelity",
        "--family",
        "hqA",
        "--alpha",
        "0.6",
        "--r",
        "0.8",
        "--p",
        "0.3",
        "--phi",
        "1.2",
        "--method",
        "mc",
        "--samples",
        "20000",
    ];
    let a = cli(&[&args[..], &["--seed", "5"]].concat());
    let b = cli(&[&args[..], &["--seed", "5"]].concat());
    let c = cli(&[&args[..], &["--seed", "6"]].concat());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    assert_eq!(json(&a)["method"], "mc");
    assert_eq!(code(&cli(&[&args[..13], &["--samples", "10"]].concat())), 1);
}

#[test]
fn threshold_root_and_failure() {
    let v = json(&cli(&["threshold", "--metric", "spq", "--var", "r", "--lo", "0.5", "--hi", "2.5", "--method", "closed"]));
    let root = v["root"].as_f64().unwrap();
    assert!(root > 1.0 && root < 1.3);
    assert_eq!(v["variable"], "r");

    let out = cli(&["threshold", "--metric", "spq", "--var", "r", "--lo", "0", "--hi", "0.5"]);
    assert_eq!(code(&out), 2);
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("f(lo)") && msg.contains("f(hi)"), "{msg}");

    assert_eq!(code(&cli(&["threshold", "--metric", "spq", "--var", "q", "--lo", "0", "--hi", "1"])), 1);
}

#[test]
fn sweep_csv_layout_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"{"families": ["spq", "hqB"], "alpha_grid": [0.5, 1.0], "r_grid": [0.0, 1.0, 2.0], "loss_grid": [0.0, 0.5], "method": "both"}"#,
    );
    let first = dir.path().join("a.csv");
    let second = dir.path().join("b.csv");
    for out in [&first, &second] {
        assert_eq!(code(&cli(&["sweep", "--config", &config, "--out", out.to_str().unwrap()])), 0);
    }
    let text = std::fs::read_to_string(&first).unwrap();
    assert_eq!(text, std::fs::read_to_string(&second).unwrap());

    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("family,alpha,r,loss,delta,fidelity,method,variant,error_estimate,status"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 2 * 2 * 3 * 2 * 3);
    assert!(rows.iter().all(|r| r.len() == 10 && r[9] == "ok"));
    let vacuum = rows.iter().find(|r| r[0] == "spq" && r[2].parse::<f64>() == Ok(0.0) && r[6] == "quad").unwrap();
    assert!((vacuum[5].parse::<f64>().unwrap() - 0.125).abs() < 1e-14);
}

#[test]
fn sweep_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    for bad in [
        r#"{"families": ["spq"], "alpha_grid": [], "r_grid": [1.0]}"#,
        r#"{"families": ["spq"], "alpha_grid": [1.0], "r_grid": [2.0, 1.0]}"#,
        r#"{"families": ["spq"], "alpha_grid": [1.0], "r_grid": [1.0], "loss_grid": [1.5]}"#,
        r#"{"families": ["spq"], "alpha_grid": [1.0], "r_grid": [1.0], "colour": "red"}"#,
        r#"{"families": ["coherent"], "alpha_grid": [1.0], "r_grid": [1.0], "topology": "pair"}"#,
    ] {
        let config = write_config(dir.path(), bad);
        assert_eq!(code(&cli(&["sweep", "--config", &config])), 1, "{bad}");
    }
    assert_eq!(code(&cli(&["sweep", "--config", "/nonexistent/sweep.json"])), 1);
}

#[test]
fn figure_dataset() {
    let out = cli(&["figure", "--id", "4"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let comments: Vec<&str> = text.lines().take_while(|l| l.starts_with('#')).collect();
    assert!(comments.iter().any(|l| l.contains("alpha set: 0.5 1 1.5 2")));
    assert!(comments.iter().any(|l| l.contains("squeezing values: 1.5 2")));
    let body: Vec<&str> = text.lines().skip(comments.len() + 1).collect();
    // spq: 2 r x 21 R x 2 methods; hqA: 4 alpha x 2 r x 21 R x 3 methods
    assert_eq!(body.len(), 84 + 504);
    assert!(body.iter().any(|l| l.contains(",quad,")));
}

#[test]
fn validate_report_schema() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = cli(&["validate", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let report: Vec<Value> = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    for item in &report {
        let keys: Vec<&str> = item.as_object().unwrap().keys().map(String::as_str).collect();
        assert_eq!(keys.len(), 6);
        for key in ["check_id", "description", "expected", "computed", "tolerance", "pass"] {
            assert!(keys.contains(&key));
        }
    }
    let get = |id: &str| report.iter().find(|c| c["check_id"] == id).unwrap_or_else(|| panic!("{id}"));
    assert_eq!(get("engine.ideal_channel")["pass"], true);
    assert_eq!(get("closed.hqA.printed_deviation")["pass"], true);
    let coherent = get("closed.coherent.printed_ideal");
    assert_eq!(coherent["pass"], false);
    assert!((coherent["computed"].as_f64().unwrap() - std::f64::consts::FRAC_1_PI).abs() < 1e-12);
}
