use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn pdtomo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pdtomo"))
        .args(args)
        .env_remove("PDTOMO_SEED")
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = pdtomo(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn values(v: &Value) -> Vec<f64> {
    v["values"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

fn path(dir: &tempfile::TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

#[test]
fn enumerate_line_counts() {
    for (m, k, n) in [("2", "1", 11), ("3", "1", 51), ("3", "2", 33), ("3", "3", 3)] {
        assert_eq!(ok(&["enumerate", "--m", m, "--k", k]).lines().count(), n);
    }
    let listing = ok(&["enumerate", "--m", "3", "--k", "3"]);
    assert_eq!(listing, "[2d^6:2d^2,d^2,d^2]\n(12)[2d^6:2d^2,d^2,d^2]\n(13)[2d^6:2d^2,d^2,d^2]\n");
    let report: Value = serde_json::from_str(&ok(&["enumerate", "--m", "2", "--k", "1", "--json"])).unwrap();
    assert_eq!(report["count"], 11);
    assert_eq!(report["corners"].as_array().unwrap().len(), 3);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(pdtomo(&["enumerate", "--m", "2", "--k", "3"]).status.code(), Some(2));
    assert_eq!(pdtomo(&["enumerate", "--m", "2"]).status.code(), Some(2));
    assert_eq!(pdtomo(&["generate", "--m", "2", "--d", "2", "--settings", "8,8"]).status.code(), Some(2));
    assert_eq!(pdtomo(&["generate", "--m", "2", "--d", "2", "--epsilon", "2"]).status.code(), Some(2));
    assert_eq!(pdtomo(&["generate", "--m", "2", "--d", "2", "--correlation", "bogus"]).status.code(), Some(2));
}

#[test]
fn generate_shape_and_zero_strength() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, c) = (path(&dir, "a.json"), path(&dir, "b.json"), path(&dir, "c.json"));
    ok(&["generate", "--m", "2", "--d", "2", "--settings", "8,8,8", "--seed", "1", "-o", &a]);
    let clean = json(Path::new(&a));
    assert_eq!(clean["format"], "pdtomo-tensor-v1");
    assert_eq!(clean["shape"], serde_json::json!([8, 8, 8]));
    let s = "8,8,8";
    ok(&["generate", "--m", "2", "--d", "2", "--settings", s, "--seed", "1", "--correlation", "spam:2", "--epsilon", "0", "-o", &b]);
    assert_eq!(values(&json(Path::new(&b))), values(&clean));
    ok(&["generate", "--m", "2", "--d", "2", "--settings", s, "--seed", "1", "--shots", "10000", "-o", &c]);
    let noisy = json(Path::new(&c));
    let diff: Vec<f64> = values(&noisy).iter().zip(values(&clean)).map(|(x, y)| (x - y).abs()).collect();
    let max = diff.iter().cloned().fold(0.0, f64::max);
    assert!(max > 1e-3 && max < 0.1, "{max}");
    assert_eq!(noisy["provenance"]["shot_noise"]["shots"], 10000);
}

#[test]
fn seed_env_overrides_flag() {
    let run = |env: Option<&str>, seed: &str| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_pdtomo"));
        cmd.args(["generate", "--m", "2", "--d", "2", "--settings", "4,4,4", "--seed", seed]);
        match env {
            Some(v) => cmd.env("PDTOMO_SEED", v),
            None => cmd.env_remove("PDTOMO_SEED"),
        };
        cmd.output().unwrap().stdout
    };
    assert_eq!(run(Some("7"), "1"), run(None, "7"));
    assert_ne!(run(None, "1"), run(None, "7"));
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_pdtomo"));
    cmd.args(["generate", "--m", "2", "--d", "2"]).env("PDTOMO_SEED", "x");
    assert_eq!(cmd.output().unwrap().status.code(), Some(2));
}

fn analyze(input: &str, extra: &[&str]) -> Value {
    let mut args = vec!["analyze", "--input", input, "--json", "--deterministic"];
    args.extend_from_slice(extra);
    serde_json::from_str(&ok(&args)).unwrap()
}

fn verdict(report: &Value, scheme: &str) -> bool {
    let r = report["records"].as_array().unwrap().iter().find(|r| r["scheme"] == scheme).unwrap();
    r["trivial"].as_bool().unwrap()
}

#[test]
fn analyze_detects_spam_two() {
    let dir = tempfile::tempdir().unwrap();
    let (clean, spam) = (path(&dir, "clean.json"), path(&dir, "spam.json"));
    ok(&["generate", "--m", "2", "--d", "2", "--seed", "3", "-o", &clean]);
    ok(&["generate", "--m", "2", "--d", "2", "--seed", "3", "--correlation", "spam:2", "--epsilon", "0.1", "-o", &spam]);
    let report = analyze(&clean, &["--k", "1"]);
    assert_eq!(report["summary"]["trivial"], 11);
    assert!(report.get("generated_at").is_none());
    let report = analyze(&spam, &[]);
    assert_eq!(report["records"].as_array().unwrap().len(), 13);
    assert!(!verdict(&report, "[2d^2;1:2d^2]"));
    assert!(verdict(&report, "(12)[2d^2;1:2d^2]"));
    let picked = analyze(&spam, &["--schemes", "[2d^2;1:2d^2]", "(12)[2d^2;1:2d^2]"]);
    assert_eq!(picked["records"].as_array().unwrap().len(), 2);
}

#[test]
fn reduced_protocol_on_rank_four_data() {
    let dir = tempfile::tempdir().unwrap();
    let clean = path(&dir, "clean.json");
    ok(&["generate", "--m", "2", "--d", "2", "--settings", "8,8,8", "--seed", "4", "-o", &clean]);
    let report = analyze(&clean, &["--k", "1", "--reduced"]);
    for r in report["records"].as_array().unwrap() {
        assert_eq!(r["reduced"]["size"], 5);
        assert!((r["reduced"]["x"].as_f64().unwrap() - 1.0).abs() < 1e-8, "{r}");
    }
}

#[test]
fn failures_are_recorded_and_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let small = path(&dir, "small.json");
    let report = path(&dir, "report.json");
    ok(&["generate", "--m", "2", "--d", "2", "--settings", "8,8,8", "--seed", "1", "-o", &small]);
    let out = pdtomo(&["analyze", "--input", &small, "-o", &report]);
    assert_eq!(out.status.code(), Some(3));
    let r = json(Path::new(&report));
    assert_eq!(r["summary"]["failed"], 2);
    assert_eq!(r["summary"]["trivial"], 11);
}

#[test]
fn io_errors_exit_1() {
    assert_eq!(pdtomo(&["analyze", "--input", "/nonexistent/x.json"]).status.code(), Some(1));
}

#[test]
fn csv_ingestion() {
    let dir = tempfile::tempdir().unwrap();
    let json_path = path(&dir, "t.json");
    ok(&["generate", "--m", "2", "--d", "2", "--settings", "8,8,8", "--seed", "5", "-o", &json_path]);
    let t = json(Path::new(&json_path));
    let vals = values(&t);
    let mut csv = String::from("a,i,j,value\n");
    for (n, v) in vals.iter().enumerate() {
        csv.push_str(&format!("{},{},{},{v:?}\n", n / 64, n / 8 % 8, n % 8));
    }
    let csv_path = path(&dir, "t.csv");
    std::fs::write(&csv_path, csv).unwrap();
    assert_eq!(pdtomo(&["analyze", "--input", &csv_path, "--k", "1"]).status.code(), Some(2));
    let from_csv = analyze(&csv_path, &["--k", "1", "--d", "2"]);
    let from_json = analyze(&json_path, &["--k", "1"]);
    assert_eq!(from_csv["records"], from_json["records"]);
}

#[test]
fn demo_runs() {
    let out = ok(&["demo", "--seed", "2"]);
    assert!(out.contains("spam:2"));
    assert!(!out.contains("MISMATCH"));
}
