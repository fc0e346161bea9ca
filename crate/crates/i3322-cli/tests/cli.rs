//! End-to-end checks of the CLI surface: output formats, exit codes, and
//! the determinism contract.

use i3322::bell::save_strategy;
use i3322::structure::{build_normal_form, NormalFormSpec};
use i3322::symmat::{Projector, SymMatrix};
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_i3322"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn write_epr25(dir: &Path) -> std::path::PathBuf {
    // The fixture is generated from the constructor, never hand-typed.
    let s = build_normal_form(&NormalFormSpec::cyclic_optimal(2).unwrap()).unwrap();
    let path = dir.join("epr25.json");
    save_strategy(&s, &path).unwrap();
    path
}

#[test]
fn value_on_epr25_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_epr25(dir.path());
    let out = run(&["value", "--strategy", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().next().unwrap(), "0.250000000000");
    assert!(text.contains("-<A2>"));
}

#[test]
fn value_on_zero_strategy() {
    let dir = tempfile::tempdir().unwrap();
    let z = || Projector::new(SymMatrix::zeros(2)).unwrap();
    let s = i3322::bell::Strategy::with_uniform(2, [z(), z(), z()], [z(), z(), z()]).unwrap();
    let path = dir.path().join("zero.json");
    save_strategy(&s, &path).unwrap();
    let out = run(&["value", "--strategy", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().next().unwrap(), "0.000000000000");
}

#[test]
fn value_on_truncated_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{\"dim\": 2, \"A\": [").unwrap();
    let out = run(&["value", "--strategy", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn classical_reports_zero_max() {
    let out = run(&["classical"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("max = 0"));
    assert!(text.contains("of 64 assignments"));
    assert!(text.contains("a=(0,0,0) b=(0,0,0)"));
}

#[test]
fn seesaw_uniform_respects_quarter_bound() {
    let out = run(&[
        "seesaw",
        "--dim",
        "2",
        "--restarts",
        "50",
        "--seed",
        "7",
        "--schmidt",
        "uniform",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let value: f64 = text
        .lines()
        .next()
        .unwrap()
        .strip_prefix("best value = ")
        .unwrap()
        .parse()
        .unwrap();
    assert!(value <= 0.25 + 1e-6, "value {value}");
}

#[test]
fn seesaw_dim_1_is_classical() {
    let out = run(&["seesaw", "--dim", "1", "--restarts", "50", "--seed", "7"]);
    assert!(out.status.success());
    let value: f64 = stdout(&out)
        .lines()
        .next()
        .unwrap()
        .strip_prefix("best value = ")
        .unwrap()
        .parse()
        .unwrap();
    assert!(value.abs() <= 1e-9, "value {value}");
}

#[test]
fn seesaw_free_weights_reaches_quarter() {
    let out = run(&[
        "seesaw",
        "--dim",
        "8",
        "--restarts",
        "3",
        "--seed",
        "1",
        "--schmidt",
        "free",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let value: f64 = text
        .lines()
        .next()
        .unwrap()
        .strip_prefix("best value = ")
        .unwrap()
        .parse()
        .unwrap();
    assert!(value >= 0.25 - 1e-9, "value {value}");
    assert!(text.lines().any(|l| l.starts_with("entropy = ")));
}

#[test]
fn normal_form_cyclic_quarter() {
    let out = run(&[
        "normal-form",
        "--branch",
        "cyclic",
        "--coeffs",
        "0.8660254037844386",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let closed: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("closed-form value = "))
        .unwrap()
        .parse()
        .unwrap();
    let direct: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("direct value      = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((closed - 0.25).abs() <= 1e-9);
    assert!((direct - 0.25).abs() <= 1e-9);
    assert!((closed - direct).abs() <= 1e-9);
}

#[test]
fn normal_form_chain_even_value() {
    let out = run(&["normal-form", "--branch", "chain-even", "--coeffs", "1,1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let direct: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("direct value      = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((direct - 0.118034).abs() <= 1e-6);
}

#[test]
fn normal_form_bad_boundary_exits_2() {
    let out = run(&["normal-form", "--branch", "chain-even", "--coeffs", "0.5,1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bounds_case3_holds() {
    let out = run(&["bounds", "--claim", "case3", "--step", "1e-3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("verdict        : holds"));
}

#[test]
fn bounds_csv_row_parses_back() {
    let out = run(&["bounds", "--claim", "d4", "--step", "1e-3", "--csv"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "claim,claimed_bound,grid_max,slack,certified_max,verdict,step,argmax"
    );
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[0], "d4");
    assert_eq!(row[5], "holds");
    let grid: f64 = row[2].parse().unwrap();
    let cert: f64 = row[4].parse().unwrap();
    assert!(cert >= grid && cert < 0.0);
}

#[test]
fn bounds_f_cap_holds() {
    let out = run(&["bounds", "--claim", "f-cap", "--step", "1e-2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("verdict        : holds"));
    assert!(text.contains("note"));
}

#[test]
fn normal_form_optimize_cyclic() {
    let out = run(&["normal-form", "--branch", "cyclic", "--optimize", "--dim", "4"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let direct: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("direct value      = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((direct - 0.25).abs() <= 1e-9, "{text}");
}

#[test]
fn bounds_fail_exits_1_at_hopeless_step() {
    // At step 0.5 the certificate slack swamps the case-1 margin, so the
    // verdict honestly fails.
    let out = run(&["bounds", "--claim", "case1", "--step", "0.5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("FAILS"));
}

#[test]
fn certify_builtin_accepted() {
    let out = run(&["certify", "--cert", "builtin"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("accepted"));
    assert!(text.contains("pivot (Schur) margin"));
}

#[test]
fn certify_lowered_bound_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let mut cert = i3322::soscheck::builtin_case3();
    cert.bound = 0.36;
    let path = dir.path().join("lowered.json");
    std::fs::write(&path, i3322::soscheck::certificate_to_json(&cert)).unwrap();
    let out = run(&["certify", "--cert", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("REJECTED"));
}

#[test]
fn scan_chain_even_monotone_and_reparses() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("scan.csv");
    let out = run(&[
        "scan",
        "--branch",
        "chain-even",
        "--dims",
        "2:12:2",
        "--out",
        csv_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let printed = stdout(&out);
    let file = std::fs::read_to_string(&csv_path).unwrap();
    assert_eq!(printed, file);
    let mut lines = file.lines();
    assert_eq!(lines.next().unwrap(), "dim,branch,value,coeffs");
    let mut prev = f64::NEG_INFINITY;
    let mut first = None;
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols[1], "chain-even");
        let value: f64 = cols[2].parse().unwrap();
        assert!(value < 0.25, "{line}");
        assert!(value >= prev - 1e-9, "not monotone: {line}");
        prev = value;
        first.get_or_insert(value);
        // coefficient column round-trips through the same formatting
        for c in cols[3].split(';') {
            let x: f64 = c.parse().unwrap();
            assert_eq!(format!("{x:.12}"), c);
        }
    }
    assert!((first.unwrap() - 0.118034).abs() <= 1e-6);
}

#[test]
fn identical_flags_produce_identical_bytes() {
    let args = ["seesaw", "--dim", "3", "--restarts", "5", "--seed", "11"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["bounds", "--claim", "case2", "--step", "5e-3", "--csv"]);
    let d = run(&["bounds", "--claim", "case2", "--step", "5e-3", "--csv"]);
    assert_eq!(c.stdout, d.stdout);
}

#[test]
fn unknown_flags_exit_2() {
    let out = run(&["seesaw", "--dimension", "2"]);
    assert_eq!(out.status.code(), Some(2));
}
