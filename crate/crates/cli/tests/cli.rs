use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name).to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cartanlab")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> (String, Value) {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    (String::from_utf8(out.stdout).unwrap(), serde_json::from_slice(&out.stderr).unwrap())
}

#[test]
fn cartan_of_the_unipotent_example() {
    let (csv, _) = ok(&["cartan", "--input", &data("unipotent.json")]);
    assert_eq!(csv, "id,mu_1,mu_2,norm\nunipotent,0.48121182506,-0.48121182506,0.680536289374\n");
}

#[test]
fn cartan_of_the_padic_example_is_integral() {
    let (csv, _) = ok(&["cartan", "--input", &data("padic-diag.json")]);
    assert_eq!(csv.lines().nth(1), Some("diag3,1,-1,1.41421356237"));
}

#[test]
fn group_and_field_flags_override_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("id.json");
    std::fs::write(&p, r#"{"matrices": [[["1","0","0"],["0","1","0"],["0","0","1"]]]}"#).unwrap();
    let (csv, _) = ok(&["cartan", "--input", p.to_str().unwrap(), "--field", "padic:5", "--group", "sl:3"]);
    assert_eq!(csv.lines().nth(1), Some("m1,0,0,0,0"));
}

#[test]
fn identity_deformation_is_flat() {
    let (_, summary) = ok(&["stability", "--input", &data("schottky-sl2.json"), "--radius", "2"]);
    let fit = &summary["fits"][0];
    assert_eq!(fit["eps_hat"], 0.0);
    assert_eq!(fit["c_hat"], 0.0);
}

#[test]
fn unbent_generators_are_not_dense() {
    let (csv, summary) = ok(&["bend", "--input", &data("bending-hnn.json"), "--t", "0"]);
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert!(!rows.is_empty());
    for r in rows {
        assert!(r.contains(",true,") && r.ends_with(",false"), "{r}");
    }
    assert_eq!(summary["rule"], "hnn");
}

#[test]
fn properness_example_has_positive_slope() {
    let (_, summary) = ok(&["properness", "--input", &data("properness-so21.json"), "--radius", "3"]);
    assert_eq!(summary["positive"], true);
    let (_, summary) = ok(&["properness", "--input", &data("properness-control.json"), "--radius", "3"]);
    assert_eq!(summary["positive"], false);
}

#[test]
fn malformed_json_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(&p, "{\n  \"matrices\": [[[\"1\", ]]]\n}\n").unwrap();
    let out = run(&["cartan", "--input", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains(":2:"), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn matrix_outside_the_group_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("det2.json");
    std::fs::write(&p, r#"{"field": {"kind": "real"}, "group": {"family": "sl", "n": 2}, "matrices": [[["2","0"],["0","1"]]]}"#)
        .unwrap();
    let out = run(&["cartan", "--input", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn output_file_gets_a_json_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ball.csv");
    let status = run(&["ball", "--input", &data("schottky-sl2.json"), "--radius", "2", "--output", out.to_str().unwrap()]);
    assert!(status.status.success());
    let csv = std::fs::read_to_string(&out).unwrap();
    assert_eq!(csv.lines().count(), 18);
    let summary: Value = serde_json::from_slice(&std::fs::read(dir.path().join("ball.json")).unwrap()).unwrap();
    assert_eq!(summary["command"], "ball");
}

#[test]
fn repeated_runs_are_identical() {
    let args = ["decompose", "--input", &data("schottky-sl2.json"), "--radius", "3", "--workers", "3"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn shipped_data_matches_the_generator() {
    for name in String::from_utf8(run(&["example", "list"]).stdout).unwrap().lines() {
        let out = run(&["example", name]);
        assert!(out.status.success());
        let shipped = std::fs::read(data(&format!("{name}.json"))).unwrap();
        assert_eq!(out.stdout, shipped, "{name}");
    }
}
