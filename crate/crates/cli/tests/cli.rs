use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_simfix"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn example() -> String {
    fixture("example41.json").to_str().unwrap().to_string()
}

#[test]
fn verify_full_condition_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = run(&[
        "verify",
        "--problem",
        &example(),
        "--kind",
        "suzuki-zag-geraghty",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report = read_json(&out);
    assert_eq!(report["schema_version"], "1");
    assert_eq!(report["report"]["holds"], true);
    assert_eq!(report["report"]["pair_records"].as_array().unwrap().len(), 20);
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("{\n  \"schema_version\": \"1\""));
}

#[test]
fn margins_are_seventeen_digit_decimals() {
    let o = run(&["verify", "--problem", &example(), "--kind", "suzuki-zag-geraghty"]);
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    let margins: Vec<&str> = report["report"]["pair_records"]
        .as_array()
        .unwrap()
        .iter()
        .filter_map(|r| r["margin"].as_str())
        .collect();
    assert!(!margins.is_empty());
    for m in margins {
        let mantissa = m.split('e').next().unwrap();
        assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17, "{m}");
        assert!(m.parse::<f64>().unwrap() > 0.0);
    }
}

#[test]
fn iterate_from_two_reaches_one_half() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("trace.csv");
    let json = dir.path().join("trace.json");
    let o = run(&[
        "iterate",
        "--problem",
        &example(),
        "--start",
        "2",
        "--out",
        csv.to_str().unwrap(),
        "--report",
        json.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let summary = read_json(&json);
    assert_eq!(summary["fixed_point"], "1/2");
    assert_eq!(summary["iterates"], serde_json::json!(["2", "1/9", "1/2", "1/2"]));
    let mut reader = csv::Reader::from_path(&csv).unwrap();
    let headers = reader.headers().unwrap().clone();
    assert_eq!(&headers[0], "n");
    assert_eq!(&headers[1], "x_n");
    assert_eq!(&headers[2], "gap");
    let labels: Vec<String> = reader.records().map(|r| r.unwrap()[1].to_string()).collect();
    assert_eq!(labels, ["2", "1/9", "1/2", "1/2"]);
}

#[test]
fn ungated_condition_on_the_fixture() {
    let o = run(&["verify", "--problem", &example(), "--kind", "z-contraction"]);
    assert_eq!(code(&o), 0);
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["report"]["holds"], true);
}

#[test]
fn failing_condition_exits_one_with_counterexample() {
    let dir = tempfile::tempdir().unwrap();
    let mut problem: Value = serde_json::from_str(&fs::read_to_string(fixture("example41.json")).unwrap()).unwrap();
    problem["zeta"] = serde_json::json!({"kind": "linear", "lambda": 0.3});
    let path = dir.path().join("p.json");
    fs::write(&path, problem.to_string()).unwrap();
    let out = dir.path().join("r.json");
    let o = run(&[
        "verify",
        "--problem",
        path.to_str().unwrap(),
        "--kind",
        "z-contraction",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 1);
    let report = read_json(&out);
    assert_eq!(report["report"]["holds"], false);
    assert!(report["report"]["counterexample"]["x_label"].is_string());
}

#[test]
fn structural_errors_exit_two() {
    let o = run(&["verify", "--problem", &example(), "--kind", "contraction"]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("suzuki-zag-geraghty") && err.contains("banach"), "{err}");

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\n  \"points\": [\"0\",\n  \"metric\" 3\n}").unwrap();
    let o = run(&["validate", "--problem", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));

    let o = run(&[
        "validate",
        "--problem",
        dir.path().join("missing.json").to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 2);
    assert_eq!(code(&run(&["verify", "--kind", "suzuki"])), 2);
    assert_eq!(code(&run(&["iterate", "--problem", &example(), "--start", "3"])), 2);
}

#[test]
fn invalid_metric_table_fails_validation() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.json");
    fs::write(
        &path,
        r#"{"points": ["0", "1", "2"], "metric": {"table": [[0, 1, 5], [1, 0, 1], [5, 1, 0]]}, "map": {"0": "0", "1": "0", "2": "0"}}"#,
    )
    .unwrap();
    let o = run(&["validate", "--problem", path.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["valid"], false);
    assert_eq!(report["metric"]["violations"][0]["axiom"], "triangle");
}

#[test]
fn hammerstein_csv_layout_and_non_convergence() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("solution.csv");
    let trace = dir.path().join("gaps.csv");
    let spec = fixture("manufactured.json");
    let o = run(&[
        "solve-hammerstein",
        "--spec",
        spec.to_str().unwrap(),
        "--grid",
        "33",
        "--out",
        out.to_str().unwrap(),
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let mut reader = csv::Reader::from_path(&out).unwrap();
    assert_eq!(reader.headers().unwrap(), vec!["t", "x", "residual"]);
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 33);
    assert!(rows[..32].iter().all(|r| r[2].is_empty()));
    assert!(rows[32][2].parse::<f64>().unwrap() <= 1e-10);
    assert_eq!(rows[32][0].parse::<f64>().unwrap(), 1.0);
    assert!(fs::read_to_string(&trace).unwrap().starts_with("k,gap\n1,"));

    let o = run(&[
        "solve-hammerstein",
        "--spec",
        spec.to_str().unwrap(),
        "--max-iter",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 1);
    let o = run(&["solve-hammerstein", "--spec", spec.to_str().unwrap(), "--grid", "1"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn check_functions_flags_boundary_zeta() {
    assert_eq!(code(&run(&["check-functions", "--grid", "32"])), 0);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.json");
    fs::write(&path, r#"{"zeta": [{"kind": "custom", "expr": "s - t"}]}"#).unwrap();
    let o = run(&["check-functions", "--grid", "32", "--functions", path.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["passed"], false);
    let last = report["zeta"].as_array().unwrap().last().unwrap().clone();
    assert_eq!(last["checks"][1]["violations"], 32 * 32);
    assert_eq!(last["limit_axioms"], "unattested");
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let bytes = |name: &str, args: &[&str]| {
        let path = dir.path().join(name);
        let mut full: Vec<&str> = args.to_vec();
        full.extend(["--out", path.to_str().unwrap()]);
        run(&full);
        fs::read(&path).unwrap()
    };
    let verify = ["verify", "--problem", &example(), "--kind", "suzuki-zag-geraghty"];
    assert_eq!(bytes("a.json", &verify), bytes("b.json", &verify));
    let sweep = ["sweep", "--seed", "9", "--target", "30"];
    assert_eq!(bytes("c.json", &sweep), bytes("d.json", &sweep));
}
