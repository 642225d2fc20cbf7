use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qst(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qst")).args(args).output().expect("run qst")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

/// Parses CSV output into header and rows.
fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines().map(|l| l.split(',').map(str::to_string).collect::<Vec<_>>());
    let header = lines.next().unwrap();
    (header, lines.collect())
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap()
}

#[test]
fn kernel_reports_closed_and_quadrature() {
    let dir = tempfile::tempdir().unwrap();
    // Λ = sinc(1/2) for (e₀, e₁) at λ_P = 1
    let file = write(dir.path(), "k.txt", "# one config\n1 0 0 0   0 1 0 0\n\n1 0 0 0\n");
    let o = qst(&["kernel", &file]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (h, rows) = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 2);
    for col in ["lambda_closed", "lambda_quad_re"] {
        assert!(rows[0][column(&h, col)].starts_with("0.95885107"), "{col}: {}", rows[0][column(&h, col)]);
    }
    assert_eq!(rows[0][column(&h, "class")], "Off");
    assert_eq!(rows[0][column(&h, "line")], "2");
    assert_eq!(rows[1][column(&h, "class")], "NA");
    let closed: f64 = rows[0][column(&h, "lambda_closed")].parse().unwrap();
    let delta: f64 = rows[0][column(&h, "delta_part")].parse().unwrap();
    let cont: f64 = rows[0][column(&h, "continuous_part")].parse().unwrap();
    assert!((closed - delta - cont).abs() < 1e-15);
}

#[test]
fn kernel_empty_file_and_parse_errors() {
    let dir = tempfile::tempdir().unwrap();
    let empty = write(dir.path(), "e.txt", "");
    let o = qst(&["kernel", &empty]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(csv_rows(&stdout(&o)).1.len(), 0);

    let bad = write(dir.path(), "b.txt", "1 0 0 0\n# ok\n1 0 0 zero\n");
    let o = qst(&["kernel", &bad]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn kernel_tolerance_breach_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "k.txt", "3 1 0 0  0 2 1 0  1 0 0 2\n");
    let o = qst(&["kernel", &file, "--quad-order", "4"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 1"));
    assert_eq!(csv_rows(&stdout(&o)).1.len(), 1);
}

#[test]
fn decay_rows_follow_input_order() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "r.txt", "0 1 0 0 0 1 0 0\n1 0 0 0 0 1 0 0\n2 1 0 0 0 0 1 0 -2 0 0 1 3 0 0 0\n");
    let o = qst(&["decay", &file]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (h, rows) = csv_rows(&stdout(&o));
    let class: Vec<&str> = rows.iter().map(|r| r[column(&h, "class")].as_str()).collect();
    assert_eq!(class, ["InBoth", "Off", "InPlusOnly"]);
    assert_eq!(rows[0][column(&h, "exponent")], "NA");
    assert_eq!(rows[0][column(&h, "asymptote")], "1");
    let exponent: f64 = rows[1][column(&h, "exponent")].parse().unwrap();
    assert!((-2.15..=-1.85).contains(&exponent), "{exponent}");
    let asym: f64 = rows[1][column(&h, "asymptote")].parse().unwrap();
    assert!(asym.abs() <= 0.01);
    let half: f64 = rows[2][column(&h, "asymptote")].parse().unwrap();
    assert!((half - 0.5).abs() <= 0.01);
}

#[test]
fn expand_writes_json_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("e1.json");
    let o = qst(&["expand", "--order", "1", "-n", "4", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).is_empty());
    assert!(stderr(&o).contains("1 topologies"), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["topologies"].as_array().unwrap().len(), 1);

    let o = qst(&["expand", "--order", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let terms = v["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 1);
    assert_eq!(terms[0]["fields"][0], "y");
}

#[test]
fn expand_is_deterministic_across_strategies() {
    let a = qst(&["expand", "--order", "2", "-n", "3"]);
    let b = qst(&["expand", "--order", "2", "-n", "3", "--strategy", "bogoliubov"]);
    let va: Value = serde_json::from_slice(&a.stdout).unwrap();
    let vb: Value = serde_json::from_slice(&b.stdout).unwrap();
    assert_eq!(va["terms"], vb["terms"]);
    assert_eq!(a.stdout, qst(&["expand", "--order", "2", "-n", "3"]).stdout);
}

#[test]
fn expand_guard_exits_three() {
    let o = qst(&["expand", "--order", "4"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("guard"));
    assert_eq!(qst(&["expand", "--order", "1", "-n", "5"]).status.code(), Some(3));
}

#[test]
fn limits_table_scales_and_is_bounded() {
    let o = qst(&["limits", "--lambdas", "1,0.5,0.25,0.125", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0));
    let (h, rows) = csv_rows(&stdout(&o));
    assert_eq!(h, ["lambda_p", "sup", "bound"]);
    let parsed: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|c| c.parse().unwrap()).collect()).collect();
    for r in &parsed {
        assert!(r[1] <= r[2]);
    }
    for w in parsed.windows(2) {
        assert!((w[0][2] / w[1][2] - 16.0).abs() < 1e-9);
    }
    assert_eq!(stdout(&o), stdout(&qst(&["limits", "--lambdas", "1,0.5,0.25,0.125", "--seed", "7"])));

    let zero = qst(&["limits", "--lambdas", "0"]);
    let (_, rows) = csv_rows(&stdout(&zero));
    assert_eq!(rows, [["0", "0", "0"]]);
}

#[test]
fn stur_holds_for_the_optimal_state() {
    let o = qst(&["stur", "--lambda-p", "0.5", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let row = &v["rows"][0];
    assert_eq!(row["time_space_ok"], true);
    assert_eq!(row["space_space_ok"], true);
    assert!((row["dq1"].as_f64().unwrap() - 0.5).abs() < 1e-6);
    assert_eq!(qst(&["stur", "--deltas", "0.1,0.1,0.1,0.1"]).status.code(), Some(1));
}

#[test]
fn slice_emits_grid_and_metadata() {
    let o = qst(&[
        "slice",
        "--config",
        "0 0 0 0 1 0 0 0",
        "--axis",
        "0:1",
        "--points",
        "64",
        "--k-max",
        "32",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 64);
    assert_eq!(v["kernel"], "closed");
    assert!(v["mass_concentration"].as_f64().unwrap() > 0.0);
    let bad = qst(&["slice", "--config", "0 0 0 0", "--axis", "3:0"]);
    assert_eq!(bad.status.code(), Some(2));
}
