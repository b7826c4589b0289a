use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn qriccati(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qriccati")).args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli-tests").join(name);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

fn check<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["checks"].as_array().unwrap().iter().find(|c| c["name"] == name).unwrap_or_else(|| panic!("no check {name}"))
}

#[test]
fn fundamental_example_passes() {
    let out = qriccati(&["run", "--scenario", "fundamental-example"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert_eq!(r["passed"], true);
    assert!(!r["anchor"].as_str().unwrap().is_empty());
    let sup = r["residuals"][0]["sup_norm"].as_f64().unwrap();
    assert!(sup <= 1e-12);
    for key in
        ["sup_norm", "l2_norm", "n_points", "scalar_part_sup", "vector_part_sup", "worst_point", "provenance", "seed"]
    {
        assert!(r["residuals"][0].get(key).is_some(), "missing {key}");
    }
}

#[test]
fn euler2_with_parameter() {
    let out = qriccati(&["run", "--scenario", "euler2-family", "--param", "A=2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(check(&r, "A = 2: sup |third component|")["value"], 0.0);
    assert!(check(&r, "A = 2: min |f - i3|")["value"].as_f64().unwrap() >= 1.0);

    let out = qriccati(&["run", "--scenario", "euler2-family", "--param", "A=1+i", "--samples", "30"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["params"]["A"], "1+i");
}

#[test]
fn transport_convergence_orders() {
    let out = qriccati(&["run", "--scenario", "transport-convergence", "--grids", "9,17,33"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    for tag in ["9 -> 17", "17 -> 33"] {
        let o = check(&r, &format!("{tag}: recombined riccati residual order"))["value"].as_f64().unwrap();
        assert!((1.7..=2.3).contains(&o));
        let o = check(&r, &format!("{tag}: exp(a x1) sin(pi x2) nodal error order"))["value"].as_f64().unwrap();
        assert!((1.7..=2.3).contains(&o));
    }
}

#[test]
fn reports_are_byte_identical() {
    let dir = scratch("identical");
    let (a, b) = (dir.join("a.json"), dir.join("b.json"));
    for p in [&a, &b] {
        let out = qriccati(&["run", "--scenario", "leibniz-logderiv", "--seed", "7", "--out", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let other = dir.join("c.json");
    qriccati(&["run", "--scenario", "leibniz-logderiv", "--seed", "8", "--out", other.to_str().unwrap()]);
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&other).unwrap());
}

#[test]
fn csv_dump_and_report_alongside() {
    let dir = scratch("csv");
    let csv = dir.join("psi.csv");
    let out = qriccati(&[
        "run",
        "--scenario",
        "euler1-transport",
        "--grid",
        "9",
        "--format",
        "csv",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x1,x2,x3,re,im"));
    assert_eq!(lines.count(), 9 * 9 * 9);
    let rep: Value = serde_json::from_str(&std::fs::read_to_string(dir.join("psi.report.json")).unwrap()).unwrap();
    assert_eq!(rep["scenario"], "euler1-transport");
}

#[test]
fn config_file_with_flag_override() {
    let dir = scratch("config");
    let cfg = dir.join("cfg.json");
    std::fs::write(&cfg, r#"{"scenario": "euler2-family", "params": {"A": "-2"}, "samples": 40, "seed": 3}"#).unwrap();
    let out = qriccati(&["run", "--config", cfg.to_str().unwrap(), "--seed", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["seed"], 4);
    assert_eq!(r["samples"], 40);
    assert_eq!(r["params"]["A"], "-2");
}

#[test]
fn failing_check_exits_one_and_still_reports() {
    let dir = scratch("fail");
    let path = dir.join("r.json");
    let out = qriccati(&["run", "--scenario", "separable-tanh", "--tol", "1e-30", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(r["passed"], false);
}

#[test]
fn config_errors_exit_two() {
    for args in [
        vec!["run", "--scenario", "no-such-scenario"],
        vec!["run", "--scenario", "euler2-family", "--param", "A=abc"],
        vec!["run", "--scenario", "euler2-family", "--param", "colour=red"],
        vec!["run", "--scenario", "fundamental-example", "--box", "1,0,0,1,0,1"],
        vec!["run", "--scenario", "fundamental-example", "--format", "csv", "--out", "x.csv"],
        vec!["run", "--scenario", "euler1-transport", "--format", "csv"],
        vec!["run", "--scenario", "euler1-transport", "--grid", "2"],
        vec!["run"],
        vec!["run", "--scenario", "euler2-family", "--format", "xml"],
    ] {
        let out = qriccati(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn list_names_every_scenario() {
    let out = qriccati(&["list"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 14);
}
