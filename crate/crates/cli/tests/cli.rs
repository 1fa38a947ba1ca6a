use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_robust-pricing"));
    c.env_remove("ROBUST_PRICING_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("robust-pricing-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    let _ = std::fs::remove_file(&path);
    path
}

fn close(v: &Value, expected: f64, tol: f64) {
    let x = v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"));
    assert!((x - expected).abs() <= tol, "{x} vs {expected}");
}

#[test]
fn price_examples() {
    let v = json(&["price", "--mu", "1", "--sigma", "0"]);
    assert_eq!(
        v,
        serde_json::json!({"kind": "deterministic", "p": 1.0, "ratio": 1.0})
    );
    let v = json(&["price", "--mu", "1", "--sigma", "1"]);
    close(&v["p"], 0.54660, 1e-4);
    close(&v["ratio"], 5.86454, 1e-4);
}

#[test]
fn lottery_example() {
    let v = json(&["lottery", "--mu", "1", "--sigma", "1"]);
    assert_eq!(v["kind"], "log_lottery");
    close(&v["pi1"], 0.27782, 1e-4);
    close(&v["pi2"], 3.7383, 1e-3);
    close(&v["ratio"], 3.5994, 1e-3);
}

#[test]
fn curve_rows_and_file_output() {
    let path = scratch("rho_d.csv");
    let out = run(&["curve", "rho_d", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let csv = std::fs::read_to_string(&path).unwrap();
    assert_eq!(csv.lines().next(), Some("r,value"));
    assert_eq!(csv.lines().count(), 202);
    assert!(csv.lines().any(|l| l == "1.00,5.86454"));

    let lower = String::from_utf8(run(&["curve", "lower"]).stdout).unwrap();
    assert!(lower.lines().any(|l| l == "0.00,1.00000"));
    let rho = String::from_utf8(run(&["curve", "rho", "--r-min", "0.5", "--r-max", "0.5"]).stdout)
        .unwrap();
    assert_eq!(rho, "r,value\n0.50,2.44026\n");

    let v = json(&["curve", "cutoff", "--format", "json"]);
    assert_eq!(v["points"].as_array().unwrap().len(), 100);
    assert!(v["points"][0].get("lambda").is_some());
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    for args in [
        &["curve", "azar_micali"][..],
        &[
            "eval",
            "--mechanism",
            "log-lottery",
            "--dist",
            "yao",
            "--mu",
            "1",
            "--sigma",
            "1",
            "--mc",
            "20000",
            "--seed",
            "4",
        ],
        &[
            "certify",
            "grid",
            "--mechanism",
            "quarter",
            "--mu",
            "1",
            "--sigma",
            "1",
            "--grid",
            "50",
        ],
    ] {
        let a = run(args);
        let b = run(args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn invalid_input_fails_without_writing() {
    let path = scratch("never.json");
    for args in [
        vec!["price", "--mu", "1", "--sigma", "-1"],
        vec!["price", "--mu", "0", "--sigma", "1"],
        vec!["curve", "nonsense"],
        vec!["curve", "rho", "--step", "0"],
        vec![
            "eval",
            "--mechanism",
            "quarter",
            "--dist",
            "two-point(3)",
            "--mu",
            "1",
            "--sigma",
            "1",
        ],
        vec!["certify", "yao", "--mu", "1", "--sigma", "0"],
        vec!["certify", "thm5", "--r", "1"],
    ] {
        let mut args = args.clone();
        args.extend(["--out", path.to_str().unwrap()]);
        let out = run(&args);
        assert!(!out.status.success(), "{args:?}");
        assert!(!path.exists(), "{args:?} wrote output");
        assert!(!out.stderr.is_empty());
    }
    let out = run(&["price", "--mu", "1"]);
    assert!(!out.status.success());
}

#[test]
fn eval_examples() {
    let v = json(&[
        "eval",
        "--mechanism",
        "log-lottery",
        "--dist",
        "yao",
        "--mu",
        "1",
        "--sigma",
        "1",
        "--exact",
    ]);
    assert_eq!(v["method"], "exact");
    assert!(v["ratio"].as_f64().unwrap() <= 3.5994);
    let v = json(&[
        "eval",
        "--mechanism",
        "quarter",
        "--dist",
        "two-point(0)",
        "--mu",
        "1",
        "--sigma",
        "1",
    ]);
    assert_eq!(v["revenue"], 0.625);
    let v = json(&[
        "eval",
        "--mechanism",
        "robust-price",
        "--dist",
        "two-point(0.54)",
        "--mu",
        "1",
        "--sigma",
        "1",
    ]);
    let ratio = v["ratio"].as_f64().unwrap();
    assert!(
        ratio.is_finite() && (ratio - 5.86454).abs() < 0.1,
        "{ratio}"
    );
    let v = json(&[
        "eval",
        "--mechanism",
        r#"{"kind":"deterministic","p":1.0}"#,
        "--dist",
        r#"{"family":"exponential","rate":1.0}"#,
    ]);
    assert_eq!(v["ratio"], 1.0);
}

#[test]
fn seed_comes_from_environment() {
    let args = [
        "eval",
        "--mechanism",
        "log-lottery",
        "--dist",
        "yao",
        "--mu",
        "1",
        "--sigma",
        "1",
        "--mc",
        "5000",
    ];
    let a = bin()
        .args(args)
        .env("ROBUST_PRICING_SEED", "11")
        .output()
        .unwrap();
    let b = run(&[&args[..], &["--seed", "11"]].concat());
    let c = run(&args);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn certify_examples() {
    let v = json(&["certify", "yao", "--mu", "1", "--sigma", "1"]);
    close(&v["ratio"], 1.0 + 2f64.ln(), 1e-9);
    assert_eq!(v["tag"], "yao_mixture");
    let v = json(&["certify", "det", "--p", "1.5", "--mu", "1", "--sigma", "1"]);
    assert_eq!(v["ratio"], "inf");
    let v = json(&[
        "certify",
        "grid",
        "--mechanism",
        "lottery",
        "--mu",
        "1",
        "--sigma",
        "1",
    ]);
    assert!(v["ratio"].as_f64().unwrap() <= 3.599402899981669 + 1e-6);
    let v = json(&["certify", "thm5", "--r", "1,1", "--delta", "1e-4"]);
    assert!(v["ratio"].as_f64().unwrap() >= 1.0 + 2f64.ln() - 0.01);
    assert_eq!(v["tag"], "thm5_multi");
}

#[test]
fn simulate_reports_and_validates() {
    let env = scratch("env.json");
    std::fs::write(
        &env,
        r#"{"n":2,"k":1,"bidders":[{"family":"exponential","rate":1.0},{"family":"exponential","rate":1.0}]}"#,
    )
    .unwrap();
    let args = [
        "simulate",
        env.to_str().unwrap(),
        "--rounds",
        "50000",
        "--seed",
        "3",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert!(v["revenue_ratio"].as_f64().unwrap() <= v["revenue_ceiling"].as_f64().unwrap());
    close(&v["revenue_ceiling"], 7.1988, 1e-3);

    let bad = scratch("bad_env.json");
    std::fs::write(&bad, r#"{"n":2,"k":3,"bidders":[{"family":"exponential","rate":1.0},{"family":"exponential","rate":1.0}]}"#).unwrap();
    let out = run(&["simulate", bad.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("invalid k"));

    std::fs::write(&bad, "{\"n\":2,\n\"k\":1,\n\"bidders\": [oops]}").unwrap();
    let out = run(&["simulate", bad.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(
        String::from_utf8_lossy(&out.stderr).contains("line 3"),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}
