use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn irp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_irp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.push("--json");
    let o = irp(&all);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    v
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Deterministic regression data: y = 1 + x1 - x2/2 + bounded noise.
fn regression_csv(n: usize, labelled: bool) -> String {
    let mut out = String::from(if labelled { "x1,x2,y\n" } else { "x1,x2\n" });
    for i in 0..n {
        let x1 = ((i * 37) % 101) as f64 / 50.0 - 1.0;
        let x2 = ((i * 61) % 103) as f64 / 51.0 - 1.0;
        let noise = ((i * 17) % 19) as f64 / 18.0 - 0.5;
        if labelled {
            writeln!(out, "{x1},{x2},{}", 1.0 + x1 - x2 / 2.0 + 0.4 * noise).unwrap();
        } else {
            writeln!(out, "{x1},{x2}").unwrap();
        }
    }
    out
}

#[test]
fn table_matches_published_values() {
    let v = json(&["table", "--k-max", "7"]);
    let rows = v["rows"].as_array().unwrap();
    let irp: Vec<f64> = rows.iter().map(|r| r["irp"].as_f64().unwrap()).collect();
    let ratio: Vec<f64> = rows.iter().map(|r| r["ratio"].as_f64().unwrap()).collect();
    assert_eq!(irp, [0.368, 0.84, 1.371, 1.942, 2.544, 3.168, 3.812, 4.472]);
    assert_eq!(
        ratio,
        [0.368, 0.42, 0.457, 0.486, 0.509, 0.528, 0.545, 0.559]
    );

    let text = stdout(&irp_ok(&["table", "--k-max", "7"]));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(
        lines[1].starts_with("IRP") && lines[1].ends_with("4.472"),
        "{text}"
    );
    assert!(
        lines[3].starts_with("ratio") && lines[3].contains("0.420"),
        "{text}"
    );
}

fn irp_ok(args: &[&str]) -> Output {
    let o = irp(args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    o
}

#[test]
fn table_single_column() {
    let v = json(&["table", "--k-max", "0", "--format", "json"]);
    let row = &v["rows"][0];
    assert_eq!(v["rows"].as_array().unwrap().len(), 1);
    assert_eq!(
        (
            row["irp"].as_f64(),
            row["icp"].as_u64(),
            row["ratio"].as_f64()
        ),
        (Some(0.368), Some(1), Some(0.368))
    );
}

#[test]
fn table_usage_errors() {
    assert_eq!(code(&irp(&["table", "--k-max", "-1"])), 2);
    assert_eq!(code(&irp(&["table", "--k-max", "65"])), 2);
}

#[test]
fn pvalue_examples() {
    let v = json(&["pvalue", "--m", "1", "--k", "0", "--finite"]);
    assert_eq!(
        (v["irp"].as_f64(), v["icp"].as_f64()),
        (Some(0.25), Some(0.5))
    );

    let v = json(&["pvalue", "--m", "1000000", "--k", "0", "--asymptotic"]);
    let p = v["pvalue"].as_f64().unwrap();
    assert!((p - 3.68e-7).abs() < 1e-9, "{p}");

    let v = json(&["pvalue", "--m", "5", "--k", "5", "--finite"]);
    assert_eq!(v["irp"].as_f64(), Some(1.0));
    assert_eq!(v["degenerate"], true);

    assert_eq!(code(&irp(&["pvalue", "--m", "5", "--k", "6"])), 2);
    assert_eq!(code(&irp(&["pvalue", "--m", "0", "--k", "0"])), 2);
    assert_eq!(code(&irp(&["pvalue", "--k", "0"])), 2);
    assert_eq!(
        code(&irp(&[
            "pvalue",
            "--m",
            "5",
            "--k",
            "1",
            "--finite",
            "--asymptotic"
        ])),
        2
    );
}

#[test]
fn text_and_json_agree() {
    let v = json(&["pvalue", "--m", "37", "--k", "2"]);
    let text = stdout(&irp_ok(&["pvalue", "--m", "37", "--k", "2"]));
    let printed: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("IRP p-value: "))
        .unwrap()
        .parse()
        .unwrap();
    assert_eq!(printed, v["irp"].as_f64().unwrap());
}

#[test]
fn predict_regression_irp_and_icp() {
    let dir = TempDir::new().unwrap();
    let train = write(&dir, "train.csv", &regression_csv(60, true));
    let test = write(&dir, "test.csv", &regression_csv(5, false));
    let base = [
        "predict",
        "--train",
        s(&train),
        "--split-at",
        "40",
        "--test",
        s(&test),
        "--task",
        "regression",
        "--epsilon",
        "0.1",
    ];

    let mut a = base.to_vec();
    a.extend(["--method", "irp"]);
    let irp_out = json(&a);
    let mut a = base.to_vec();
    a.extend(["--method", "icp"]);
    let icp_out = json(&a);

    let m = irp_out["m"].as_u64().unwrap();
    let k = irp_out["k"].as_u64().unwrap();
    assert_eq!((m, irp_out["l"].as_u64().unwrap()), (20, 40));
    let irp_rows = irp_out["predictions"].as_array().unwrap();
    let icp_rows = icp_out["predictions"].as_array().unwrap();
    assert_eq!(irp_rows.len(), 5);
    for (r, c) in irp_rows.iter().zip(icp_rows) {
        assert_eq!(r["set"], c["set"]);
        assert_eq!(r["set"]["kind"], "interval");
        assert_eq!(r["k"].as_u64(), Some(k));
        let want_icp = (k + 1) as f64 / (m + 1) as f64;
        assert!((c["incertitude"].as_f64().unwrap() - want_icp).abs() < 1e-11);
        if k == 0 {
            let mf = m as f64;
            let want = (mf * mf.ln() - (mf + 1.0) * (mf + 1.0).ln()).exp();
            assert!((r["incertitude"].as_f64().unwrap() - want).abs() < 1e-11);
        }
        assert!(r["incertitude"].as_f64() < c["incertitude"].as_f64());
        assert_eq!(r["vacuous"], false);
        assert_eq!(r["gamma"], r["set"]);
    }
}

#[test]
fn predict_classification_vacuous_row() {
    let dir = TempDir::new().unwrap();
    let mut train = String::from("a,b,y\n");
    for i in 0..80 {
        let a = ((i * 29) % 80) as f64 / 40.0 - 1.0;
        let b = ((i * 53) % 80) as f64 / 40.0 - 1.0;
        writeln!(train, "{a},{b},{}", if a + 0.5 * b > 0.0 { 1 } else { -1 }).unwrap();
    }
    let train = write(&dir, "train.csv", &train);
    let test = write(&dir, "test.csv", "a,b,y\n0,0,1\n5,5,1\n");
    let v = json(&[
        "predict",
        "--train",
        s(&train),
        "--split-at",
        "60",
        "--test",
        s(&test),
        "--task",
        "classification",
        "--epsilon",
        "0.1",
        "--method",
        "irp",
        "--seed",
        "3",
    ]);
    let rows = v["predictions"].as_array().unwrap();
    assert_eq!(rows[0]["vacuous"], true);
    assert_eq!(rows[0]["set"]["labels"], serde_json::json!([-1, 1]));
    assert_eq!(rows[1]["set"]["labels"], serde_json::json!([1]));
    assert_eq!(rows[1]["covered"], true);
    assert_eq!(v["errors"], 0);
}

#[test]
fn malformed_csv_reports_row_and_column() {
    let dir = TempDir::new().unwrap();
    let test = write(&dir, "test.csv", "x1,x2\n0,0\n");
    let cases = [
        ("x1,x2,y\n1,2,3\n1,abc,3\n", "line 3"),
        ("x1,x2,y\n1,2,3\n1,2\n", "line 3"),
        ("x1,x2,y\n1,inf,3\n", "line 2"),
    ];
    for (body, want) in cases {
        let train = write(&dir, "train.csv", body);
        let o = irp(&[
            "predict",
            "--train",
            s(&train),
            "--split-at",
            "1",
            "--test",
            s(&test),
            "--task",
            "regression",
        ]);
        let err = String::from_utf8_lossy(&o.stderr);
        assert_eq!(code(&o), 2, "{err}");
        assert!(err.contains(want), "{err}");
    }
    let train = write(&dir, "train.csv", "x,y\n0,1\n1,0.5\n");
    let o = irp(&[
        "predict",
        "--train",
        s(&train),
        "--split-at",
        "1",
        "--test",
        s(&test),
        "--task",
        "classification",
    ]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}

#[test]
fn validate_exact() {
    let v = json(&["validate", "--mode", "exact", "--m", "10"]);
    assert_eq!(v["passed"], true);
    let names: Vec<&str> = v["cells"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["pvariable"].as_str().unwrap())
        .collect();
    assert!(names.iter().any(|n| n == &"binary_irp") && names.iter().any(|n| n == &"icp"));
    assert_eq!(code(&irp(&["validate", "--mode", "exact", "--m", "25"])), 2);
}

#[test]
fn validate_monte_carlo_small() {
    let v = json(&[
        "validate",
        "--mode",
        "mc",
        "--trials",
        "500",
        "--epsilon",
        "0.1",
        "--seed",
        "1",
        "--l",
        "60",
        "--m",
        "10",
    ]);
    assert_eq!(v["passed"], true);
    assert_eq!(v["set_mismatches"], 0);
    assert_eq!(v["trials"], 500);
}

#[test]
fn dominate_examples() {
    let v = json(&["dominate", "--m", "4", "--threshold", "0.5"]);
    assert_eq!(v["verdict"], "strict");
    assert_eq!(
        (v["witness"]["p1"].as_f64(), v["witness"]["p2"].as_f64()),
        (Some(0.08192), Some(0.2))
    );
    let v = json(&["dominate", "--m", "1", "--threshold", "0.5"]);
    assert_eq!(
        (v["witness"]["p1"].as_f64(), v["witness"]["p2"].as_f64()),
        (Some(0.25), Some(0.5))
    );
    assert_eq!(
        code(&irp(&["dominate", "--m", "0", "--threshold", "0.5"])),
        2
    );
    assert_eq!(
        code(&irp(&["dominate", "--m", "4", "--threshold", "1.5"])),
        2
    );
}

#[test]
fn identical_runs_are_byte_identical() {
    let args = [
        "validate", "--mode", "mc", "--trials", "300", "--seed", "9", "--l", "40", "--m", "8",
        "--json",
    ];
    assert_eq!(irp(&args).stdout, irp(&args).stdout);
    let args = ["table", "--k-max", "5", "--json"];
    assert_eq!(irp(&args).stdout, irp(&args).stdout);
}

#[test]
fn config_file_supplies_defaults() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "irp.toml", "m = 4\nthreshold = 0.25\n");
    let v = json(&["dominate", "--config", s(&cfg)]);
    assert_eq!(
        (v["m"].as_u64(), v["threshold"].as_f64()),
        (Some(4), Some(0.25))
    );
    let v = json(&["dominate", "--config", s(&cfg), "--m", "2"]);
    assert_eq!(v["m"], 2);
    let bad = write(&dir, "bad.toml", "mm = 4\n");
    assert_eq!(code(&irp(&["dominate", "--config", s(&bad)])), 2);
}
