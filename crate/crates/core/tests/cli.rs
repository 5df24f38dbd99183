use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_funcord"));
    cmd.env_remove("FUNCORD_SEED");
    cmd
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn run(args: &[&str]) -> (i32, Value, Output) {
    let out = bin().args(args).output().unwrap();
    let code = out.status.code().unwrap();
    let report = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (code, report, out)
}

fn functional(dir: &Path, name: &str, algebra: &str, values: &str) -> String {
    let body = format!(r#"{{"algebra": "{algebra}", "values": {values}}}"#);
    write(dir, name, &body).to_string_lossy().into_owned()
}

fn reals(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|p| p[0].as_f64().unwrap()).collect()
}

#[test]
fn validate_command() {
    let (code, report, _) = run(&["validate", "--algebra", "direct_sum(functions(2),matrix(2))"]);
    assert_eq!(code, 0);
    assert_eq!(report["result"]["dim"], 6);
    assert_eq!(report["result"]["valid"], true);
    assert_eq!(report["version"], funcord::VERSION);
}

#[test]
fn validate_rejects_broken_structure() {
    let dir = TempDir::new().unwrap();
    // functions(1) with b0 b0 = 2 b0 and unit b0
    let body = r#"{"label": "broken", "dim": 1, "structure": [[[[2.0, 0.0]]]], "involution": [[[1.0, 0.0]]], "unit": [[1.0, 0.0]]}"#;
    let path = write(dir.path(), "a.json", body);
    let (code, report, _) = run(&["validate", "--algebra", path.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert_eq!(report["result"]["valid"], false);
}

#[test]
fn gram_command() {
    let dir = TempDir::new().unwrap();
    let f = functional(dir.path(), "f.json", "matrix(2)", "[0.5, 0, 0, 0.5]");
    let (code, report, _) = run(&["gram", "--f", &f]);
    assert_eq!(code, 0);
    assert_eq!(report["result"]["positivity"]["positive"], true);
    assert_eq!(report["result"]["rank"], 4);
}

#[test]
fn gns_zero_product_fails_cyclic_bound() {
    let dir = TempDir::new().unwrap();
    let f = functional(dir.path(), "z.json", "zero_product(1)", "[1]");
    let (code, report, _) = run(&["gns", "--f", &f]);
    assert_eq!(code, 2);
    assert_eq!(report["status"], "error");
    assert_eq!(report["error"]["condition"], "cyclic_bound");
}

#[test]
fn gns_command() {
    let dir = TempDir::new().unwrap();
    let f = functional(dir.path(), "f.json", "functions(2)", "[1, 1]");
    let (code, report, _) = run(&["gns", "--f", &f]);
    assert_eq!(code, 0);
    assert_eq!(report["result"]["space_dim"], 2);
    assert!((report["result"]["hilbert_bound"].as_f64().unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn parsum_command() {
    let dir = TempDir::new().unwrap();
    let f = functional(dir.path(), "f.json", "functions(2)", "[3, 3]");
    let g = functional(dir.path(), "g.json", "functions(2)", "[[2, 0], [2, 0]]");
    let (code, report, _) = run(&["parsum", "--f", &f, "--g", &g]);
    assert_eq!(code, 0);
    for v in reals(&report["result"]["value"]) {
        assert!((v - 1.2).abs() < 1e-12);
    }
    assert_eq!(report["result"]["singular"], false);
}

#[test]
fn lebesgue_command() {
    let dir = TempDir::new().unwrap();
    let f = functional(dir.path(), "f.json", "functions(2)", "[1, 1]");
    let g = functional(dir.path(), "g.json", "functions(2)", "[1, 0]");
    let (code, report, _) = run(&["lebesgue", "--f", &f, "--g", &g]);
    assert_eq!(code, 0);
    assert_eq!(report["tolerance"], 1e-7);
    let reg = reals(&report["result"]["regular"]);
    assert!((reg[0] - 1.0).abs() < 1e-7 && reg[1].abs() < 1e-7);

    let (code, report, _) = run(&["lebesgue", "--f", &f, "--g", &g, "--exact"]);
    assert_eq!(code, 0);
    assert_eq!(report["result"]["method"], "commutant");
    assert!(report["result"]["commutant_divergence"].as_f64().unwrap() < 1e-6);
}

#[test]
fn extreme_command() {
    let dir = TempDir::new().unwrap();
    let h = functional(dir.path(), "h.json", "functions(2)", "[1, 0]");
    let lo = functional(dir.path(), "lo.json", "functions(2)", "[0, 0]");
    let hi = functional(dir.path(), "hi.json", "functions(2)", "[1, 1]");
    let (code, report, _) = run(&["extreme", "--h", &h, "--lo", &lo, "--hi", &hi]);
    assert_eq!(code, 0);
    assert_eq!(report["result"]["extreme"], true);

    let (code, report, _) = run(&["extreme", "--h", &hi, "--lo", &lo, "--hi", &h]);
    assert_eq!(code, 2);
    assert_eq!(report["error"]["kind"], "order_violation");
}

#[test]
fn infimum_command() {
    let dir = TempDir::new().unwrap();
    let f = functional(dir.path(), "f.json", "functions(2)", "[2, 1]");
    let g = functional(dir.path(), "g.json", "functions(2)", "[1, 3]");
    let (code, report, _) = run(&["infimum", "--f", &f, "--g", &g]);
    assert_eq!(code, 0);
    assert_eq!(report["result"]["status"], "unknown");
    let (code, report, _) = run(&["infimum", "--f", &f, "--g", &g, "--backend", "commutative"]);
    assert_eq!(code, 0);
    assert_eq!(reals(&report["result"]["value"]), vec![1.0, 1.0]);
    let (code, _, _) = run(&["infimum", "--f", &f, "--g", &g, "--backend", "matrix"]);
    assert_eq!(code, 1);
}

#[test]
fn oracle_check_trend() {
    let (code, report, out) = run(&["oracle-check", "--suite", "trend", "--pretty"]);
    assert_eq!(code, 0);
    let points = report["result"]["trend"].as_array().unwrap();
    assert_eq!(points.len(), 5);
    assert_eq!(points[4]["dim"], 32);
    assert!((points[4]["c_min"].as_f64().unwrap() - 1024.0).abs() < 10.24);
    assert!(String::from_utf8_lossy(&out.stderr).contains("c_min"));
}

#[test]
fn oracle_check_writes_file_and_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let (code, _, _) = run(&[
            "oracle-check", "--suite", "matrix", "--cases", "8", "--seed", "17", "--out", p.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
    }
    let (ra, rb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ra, rb);
    let report: Value = serde_json::from_slice(&ra).unwrap();
    assert_eq!(report["seed"], 17);
    assert_eq!(report["result"]["passed"], 8);
}

#[test]
fn seed_env_overrides_flag() {
    let out = bin()
        .args(["oracle-check", "--suite", "commutative", "--cases", "3", "--seed", "1"])
        .env("FUNCORD_SEED", "99")
        .output()
        .unwrap();
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["seed"], 99);
}

#[test]
fn trend_command() {
    let (code, report, _) = run(&["trend", "--max-dim", "8"]);
    assert_eq!(code, 0);
    let points = report["result"]["points"].as_array().unwrap();
    assert_eq!(points.len(), 7);
    assert_eq!(points[6]["c_min"], 64.0);
}

#[test]
fn usage_errors_exit_one() {
    let (code, _, out) = run(&["infimum", "--f", "a.json"]);
    assert_eq!(code, 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("--g"));
    let (code, _, _) = run(&["parsum", "--tol", "-1", "--f", "a", "--g", "b"]);
    assert_eq!(code, 1);
    let (code, _, _) = run(&["transmogrify"]);
    assert_eq!(code, 1);
    let (code, report, _) = run(&["gram", "--f", "/nonexistent/f.json"]);
    assert_eq!(code, 1);
    assert_eq!(report["error"]["kind"], "io");
}

#[test]
fn malformed_json_exits_one() {
    let dir = TempDir::new().unwrap();
    let p = write(dir.path(), "f.json", "{ not json");
    let (code, report, _) = run(&["gram", "--f", p.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(report["error"]["kind"], "json");
}
